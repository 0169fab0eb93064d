#include "heislift/extend.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "heislift/errors.hpp"
#include "heislift/parallel.hpp"

namespace heislift {

namespace {

double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Closest point to x on the simplex spanned by pts (brute force over faces;
// the simplices here have at most a handful of vertices).
std::vector<double> closest_on_simplex(const std::vector<std::vector<double>>& pts, std::span<const double> x) {
  const int k = static_cast<int>(pts.size());
  const int m = static_cast<int>(x.size());
  std::vector<double> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    const int l = static_cast<int>(idx.size()) - 1;
    std::vector<double> w(idx.size(), 0.0);
    if (l == 0) {
      w[0] = 1.0;
    } else {
      Eigen::MatrixXd e(m, l);
      Eigen::VectorXd r(m);
      for (int c = 0; c < m; ++c) {
        for (int j = 0; j < l; ++j) e(c, j) = pts[idx[j + 1]][c] - pts[idx[0]][c];
        r(c) = x[c] - pts[idx[0]][c];
      }
      const Eigen::VectorXd s = e.colPivHouseholderQr().solve(r);
      double rest = 1.0;
      bool inside = true;
      for (int j = 0; j < l; ++j) {
        w[j + 1] = s(j);
        rest -= s(j);
        inside = inside && s(j) >= 0.0;
      }
      w[0] = rest;
      if (!inside || rest < 0.0) continue;
    }
    std::vector<double> p(m, 0.0);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (int c = 0; c < m; ++c) p[c] += w[j] * pts[idx[j]][c];
    }
    const double d = euclid(p, x);
    if (d < best_d) {
      best_d = d;
      best = std::move(p);
    }
  }
  return best;
}

std::vector<double> random_point(const std::vector<std::vector<double>>& pts, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(pts.size());
  double total = 0.0;
  for (double& v : w) total += (v = expo(rng));
  std::vector<double> p(pts.front().size(), 0.0);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    for (std::size_t c = 0; c < p.size(); ++c) p[c] += w[j] / total * pts[j][c];
  }
  return p;
}

std::vector<std::vector<double>> pick(const std::vector<std::vector<double>>& v, unsigned mask) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask & (1u << i)) out.push_back(v[i]);
  }
  return out;
}

}  // namespace

BoundaryData BoundaryData::make(std::vector<std::vector<double>> sites, std::vector<TargetPoint> values,
                                const TargetSpace& target) {
  if (sites.empty()) throw std::invalid_argument("boundary data has no sites");
  if (sites.size() != values.size()) throw std::invalid_argument("boundary data: sites and values differ in count");
  const std::size_t m = sites.front().size();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].size() != m) throw std::invalid_argument("boundary data: site " + std::to_string(i) + " has wrong dimension");
    target.check_point(values[i]);
    for (double c : sites[i]) {
      if (!std::isfinite(c)) throw std::invalid_argument("boundary data: non-finite site coordinate");
    }
    for (double c : values[i]) {
      if (!std::isfinite(c)) throw std::invalid_argument("boundary data: non-finite value");
    }
  }
  BoundaryData d{std::move(sites), std::move(values), 0.0};
  for (std::size_t i = 0; i < d.sites.size(); ++i) {
    for (std::size_t j = i + 1; j < d.sites.size(); ++j) {
      const double dz = euclid(d.sites[i], d.sites[j]);
      if (dz == 0.0) throw std::invalid_argument("boundary data: duplicate site " + std::to_string(j));
      d.lipschitz = std::max(d.lipschitz, target.dist(d.values[i], d.values[j]) / dz);
    }
  }
  return d;
}

std::vector<VertexAssignment> assign_vertices(const SimplicialComplex& complex, const CompactSet& z) {
  if (z.size() == 0) throw std::invalid_argument("assign_vertices: empty site set");
  std::vector<VertexAssignment> out(complex.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) {
    const auto near = z.nearest(complex.vertex(v));
    out[v] = {near.index, near.distance};
  }
  return out;
}

double corner_factor(const std::vector<std::vector<double>>& simplex, int samples, std::uint64_t seed) {
  const unsigned full = (1u << simplex.size()) - 1;
  std::mt19937_64 rng(seed);
  double worst = 1.0;
  for (unsigned a = 1; a <= full; ++a) {
    for (unsigned b = a + 1; b <= full; ++b) {
      const unsigned common = a & b;
      if (!common) continue;
      const auto fa = pick(simplex, a);
      const auto fb = pick(simplex, b);
      const auto fc = pick(simplex, common);
      for (int s = 0; s < samples; ++s) {
        const auto x = random_point(fa, rng);
        const auto y = random_point(fb, rng);
        const double xy = euclid(x, y);
        if (xy < 1e-12) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : {closest_on_simplex(fc, x), closest_on_simplex(fc, y)}) {
          best = std::min(best, (euclid(x, v) + euclid(v, y)) / xy);
        }
        worst = std::max(worst, best);
      }
    }
  }
  return worst;
}

SkeletonMap extend_skeleton(const SimplicialComplex& complex, const CompactSet& z, const BoundaryData& data,
                            const TargetSpace& target, int n, int jobs) {
  const int m = complex.dim();
  if (n < 1 || n > m) throw std::invalid_argument("skeleton dimension n must satisfy 1 <= n <= m");
  if (data.sites.size() != z.size()) throw std::invalid_argument("boundary data does not match the site set");
  for (int k = 0; k < n; ++k) {
    if (!target.supports_fill(k)) throw UnsupportedFill(target.name(), k);
  }

  SkeletonMap sk;
  sk.n = n;
  sk.vertices = assign_vertices(complex, z);
  sk.vertex_values.reserve(sk.vertices.size());
  for (const auto& a : sk.vertices) sk.vertex_values.push_back(data.values[a.site]);

  const double lip = data.lipschitz;
  const QualityReport quality = quality_report(complex, z);
  sk.vertex_report.edge_bound = quality.max_diam_over_beta * (12.0 * std::sqrt(static_cast<double>(m)) + 1.0) + 1.0;

  std::vector<double> witness_error(sk.vertices.size(), 0.0);
  parallel_for(sk.vertices.size(), jobs, [&](std::size_t v) {
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i) brute = std::min(brute, euclid(complex.vertex(v), z.point(i)));
    witness_error[v] = std::abs(brute - euclid(complex.vertex(v), z.point(sk.vertices[v].site)));
  });
  for (double e : witness_error) sk.vertex_report.max_witness_error = std::max(sk.vertex_report.max_witness_error, e);

  sk.cells.assign(n + 1, {});
  for (int k = 1; k <= n; ++k) {
    auto& cells = sk.cells[k];
    cells.resize(complex.simplex_count(k));
    parallel_for(cells.size(), jobs, [&](std::size_t id) {
      CellBoundary bd;
      for (int v : complex.simplex(k, id)) {
        const auto p = complex.vertex(v);
        bd.vertices.emplace_back(p.begin(), p.end());
        bd.values.push_back(sk.vertex_values[v]);
      }
      if (k == 1) {
        bd.lipschitz = target.dist(bd.values[0], bd.values[1]) / euclid(bd.vertices[0], bd.vertices[1]);
      }
      cells[id] = fill_sphere(target, k - 1, bd);
    });
  }

  for (std::size_t e = 0; e < complex.simplex_count(1); ++e) {
    const auto s = complex.simplex(1, e);
    const double ratio = target.dist(sk.vertex_values[s[0]], sk.vertex_values[s[1]]) /
                         euclid(complex.vertex(s[0]), complex.vertex(s[1]));
    if (lip > 0.0) sk.vertex_report.max_edge_ratio = std::max(sk.vertex_report.max_edge_ratio, ratio / lip);
  }
  for (const auto& c : sk.cells[1]) sk.max_edge_lipschitz = std::max(sk.max_edge_lipschitz, c.lipschitz());
  double top = 0.0;
  for (const auto& c : sk.cells[n]) top = std::max(top, c.lipschitz());
  sk.c_tilde = lip > 0.0 ? top / lip : 0.0;

  // Corner factor: one representative per similarity class.
  SimilarityClasses classes;
  std::vector<std::size_t> reps;
  for (std::size_t t = 0; t < complex.simplex_count(m); ++t) {
    if (classes.classify(edge_profile(simplex_vertices(complex, m, t))) == reps.size()) reps.push_back(t);
  }
  std::uint64_t seed = 1;
  for (std::size_t t : reps) sk.corner_mu = std::max(sk.corner_mu, corner_factor(simplex_vertices(complex, m, t), 64, seed++));
  return sk;
}

Projection radial_project(const SimplicialComplex& complex, std::size_t top, std::span<const double> bary, int n,
                          double eps_sing) {
  const int m = complex.dim();
  if (static_cast<int>(bary.size()) != m + 1) throw std::invalid_argument("radial_project: barycentric size mismatch");
  Projection out;
  out.bary.assign(bary.begin(), bary.end());
  auto& lam = out.bary;
  const auto verts = complex.simplex(m, top);
  const double diam = complex.top_diameter(top);
  std::vector<double> diff(m);

  for (int j = m; j > n; --j) {
    int support = 0;
    double min_lam = std::numeric_limits<double>::infinity();
    for (double l : lam) {
      if (l > 0.0) {
        ++support;
        min_lam = std::min(min_lam, l);
      }
    }
    if (support != j + 1) continue;
    const double lc = 1.0 / (j + 1);
    std::fill(diff.begin(), diff.end(), 0.0);
    for (int i = 0; i <= m; ++i) {
      if (lam[i] <= 0.0) continue;
      const auto p = complex.vertex(verts[i]);
      for (int c = 0; c < m; ++c) diff[c] += (lam[i] - lc) * p[c];
    }
    double dist = 0.0;
    for (double d : diff) dist += d * d;
    dist = std::sqrt(dist);
    if (dist < eps_sing * diam) throw SingularProximity("point is within eps_sing of a projection center");
    out.stage_factors.push_back(diam / dist);

    // x = c + t (z - c) with z on the boundary of the face.
    const double t = 1.0 - (j + 1) * min_lam;
    double total = 0.0;
    for (double& l : lam) {
      if (l <= 0.0) continue;
      if (l == min_lam) {
        l = 0.0;
        continue;
      }
      l = lc + (l - lc) / t;
      if (l <= 1e-14) l = 0.0;
      total += l;
    }
    for (double& l : lam) l /= total;
  }
  return out;
}

ExtensionField::ExtensionField(std::shared_ptr<const SimplicialComplex> complex, std::shared_ptr<const CompactSet> z,
                               BoundaryData data, TargetSpace target, SkeletonMap skeleton, FieldPolicy policy)
    : complex_(std::move(complex)),
      z_(std::move(z)),
      data_(std::move(data)),
      target_(std::move(target)),
      skeleton_(std::move(skeleton)),
      policy_(policy) {
  const auto& dec = complex_->decomposition();
  collar_ = policy_.collar >= 0.0 ? policy_.collar : 2.0 * dec.frame.diameter(dec.max_generation);
  constant_value_ = skeleton_.vertex_values.empty() ? data_.values.front() : skeleton_.vertex_values.front();
}

TargetPoint ExtensionField::evaluate_cell(std::size_t top, std::span<const double> bary) const {
  const int m = complex_->dim();
  unsigned mask = 0;
  for (int i = 0; i <= m; ++i) {
    if (bary[i] > 0.0) mask |= 1u << i;
  }
  const int k = std::popcount(mask) - 1;
  const auto verts = complex_->simplex(m, top);
  if (k == 0) return skeleton_.vertex_values[verts[std::countr_zero(mask)]];
  std::vector<double> sub;
  for (int i = 0; i <= m; ++i) {
    if (mask & (1u << i)) sub.push_back(bary[i]);
  }
  return skeleton_.cells[k][complex_->face_id(top, mask)].evaluate(sub);
}

Evaluation ExtensionField::evaluate_detailed(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != m()) throw std::invalid_argument("evaluate: point has wrong dimension");
  if (!omega().contains(x)) throw std::invalid_argument("evaluate: point is outside omega");
  Evaluation ev;
  const auto near = z_->nearest(x);
  if (near.distance <= collar_) {
    ev.kind = SampleKind::Collar;
    ev.value = data_.values[near.index];
    return ev;
  }
  auto loc = complex_->try_locate(x);
  if (!loc) {
    ev.kind = SampleKind::Collar;
    ev.value = data_.values[near.index];
    return ev;
  }
  ev.simplex = static_cast<long>(loc->simplex);
  auto& lam = loc->bary;
  double total = 0.0;
  for (double& l : lam) {
    if (l <= 1e-13) l = 0.0;
    total += l;
  }
  for (double& l : lam) l /= total;
  try {
    const Projection p = radial_project(*complex_, loc->simplex, lam, n(), policy_.eps_sing);
    ev.value = evaluate_cell(loc->simplex, p.bary);
  } catch (const SingularProximity&) {
    ev.kind = SampleKind::Singular;
    ev.value = constant_value_;
  }
  return ev;
}

SegmentSamples ExtensionField::eval_on_segment(std::span<const double> a, std::span<const double> b, int steps) const {
  if (steps < 0) throw std::invalid_argument("eval_on_segment: negative step count");
  SegmentSamples out;
  const bool degenerate = std::equal(a.begin(), a.end(), b.begin(), b.end());
  const int count = degenerate ? 1 : steps + 1;
  for (int i = 0; i < count; ++i) {
    std::vector<double> x(a.size());
    const double s = count == 1 ? 0.0 : static_cast<double>(i) / steps;
    for (std::size_t c = 0; c < x.size(); ++c) x[c] = i == steps ? b[c] : a[c] + s * (b[c] - a[c]);
    auto ev = evaluate_detailed(x);
    out.points.push_back(std::move(x));
    out.values.push_back(std::move(ev.value));
    out.kinds.push_back(ev.kind);
  }
  return out;
}

ExtensionField build_field(const Box& omega, int max_generation, BoundaryData data, const TargetSpace& target, int n,
                           FieldPolicy policy, int jobs) {
  auto z = std::make_shared<const CompactSet>(data.sites);
  auto complex = std::make_shared<const SimplicialComplex>(build_complex(decompose(*z, omega, max_generation)));
  SkeletonMap sk = extend_skeleton(*complex, *z, data, target, n, jobs);
  return ExtensionField(std::move(complex), std::move(z), std::move(data), target, std::move(sk), policy);
}

void to_json(nlohmann::json& j, const VertexReport& r) {
  j = nlohmann::json{{"max_edge_ratio", r.max_edge_ratio},
                     {"edge_bound", r.edge_bound},
                     {"max_witness_error", r.max_witness_error}};
}

nlohmann::json field_to_json(const ExtensionField& f) {
  const auto& sc = f.complex();
  const auto& sk = f.skeleton();
  std::vector<std::size_t> counts;
  for (int k = 0; k <= sc.dim(); ++k) counts.push_back(sc.simplex_count(k));
  std::vector<std::size_t> witnesses;
  for (const auto& a : sk.vertices) witnesses.push_back(a.site);
  nlohmann::json cells = nlohmann::json::array();
  for (int k = 1; k <= sk.n; ++k) {
    nlohmann::json layer = nlohmann::json::array();
    for (const auto& c : sk.cells[k]) layer.push_back(c);
    cells.push_back(std::move(layer));
  }
  return nlohmann::json{
      {"format", "heislift-field"},
      {"version", 1},
      {"target", f.target()},
      {"m", f.m()},
      {"n", sk.n},
      {"omega", f.omega()},
      {"max_generation", sc.decomposition().max_generation},
      {"policy", {{"eps_sing", f.eps_sing()}, {"collar", f.collar()}, {"constant_value", f.constant_value()}}},
      {"sites", f.data().sites},
      {"values", f.data().values},
      {"lipschitz", f.data().lipschitz},
      {"complex", {{"vertex_count", sc.vertex_count()}, {"simplex_counts", counts}}},
      {"constants",
       {{"c_tilde", sk.c_tilde}, {"max_edge_lipschitz", sk.max_edge_lipschitz}, {"corner_mu", sk.corner_mu},
        {"vertex_report", sk.vertex_report}}},
      {"vertex_sites", witnesses},
      {"cells", cells}};
}

ExtensionField field_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "heislift-field") throw std::invalid_argument("not a heislift field bundle");
  const TargetSpace target = target_from_json(j.at("target"));
  BoundaryData data = BoundaryData::make(j.at("sites").get<std::vector<std::vector<double>>>(),
                                         j.at("values").get<std::vector<TargetPoint>>(), target);
  if (data.lipschitz != j.at("lipschitz").get<double>()) throw std::invalid_argument("stored Lipschitz constant differs");
  const Box omega = j.at("omega").get<Box>();
  auto z = std::make_shared<const CompactSet>(data.sites);
  auto complex =
      std::make_shared<const SimplicialComplex>(build_complex(decompose(*z, omega, j.at("max_generation").get<int>())));
  if (complex->vertex_count() != j.at("complex").at("vertex_count").get<std::size_t>()) {
    throw std::invalid_argument("rebuilt complex has a different vertex count");
  }
  const auto counts = j.at("complex").at("simplex_counts").get<std::vector<std::size_t>>();
  for (int k = 0; k <= complex->dim(); ++k) {
    if (counts.at(k) != complex->simplex_count(k)) throw std::invalid_argument("rebuilt complex has different simplices");
  }

  SkeletonMap sk;
  sk.n = j.at("n").get<int>();
  sk.vertices = assign_vertices(*complex, *z);
  const auto stored = j.at("vertex_sites").get<std::vector<std::size_t>>();
  if (stored.size() != sk.vertices.size()) throw std::invalid_argument("vertex table size differs");
  for (std::size_t v = 0; v < stored.size(); ++v) {
    if (stored[v] != sk.vertices[v].site) throw std::invalid_argument("vertex witness differs at vertex " + std::to_string(v));
    sk.vertex_values.push_back(data.values[stored[v]]);
  }
  sk.cells.assign(sk.n + 1, {});
  const auto& layers = j.at("cells");
  for (int k = 1; k <= sk.n; ++k) {
    const auto& layer = layers.at(k - 1);
    if (layer.size() != complex->simplex_count(k)) throw std::invalid_argument("cell table size differs");
    sk.cells[k].reserve(layer.size());
    for (const auto& c : layer) sk.cells[k].push_back(cell_from_json(c));
  }
  const auto& consts = j.at("constants");
  sk.c_tilde = consts.at("c_tilde").get<double>();
  sk.max_edge_lipschitz = consts.at("max_edge_lipschitz").get<double>();
  sk.corner_mu = consts.at("corner_mu").get<double>();
  const auto& vr = consts.at("vertex_report");
  sk.vertex_report = {vr.at("max_edge_ratio").get<double>(), vr.at("edge_bound").get<double>(),
                      vr.at("max_witness_error").get<double>()};

  FieldPolicy policy;
  policy.eps_sing = j.at("policy").at("eps_sing").get<double>();
  policy.collar = j.at("policy").at("collar").get<double>();
  return ExtensionField(std::move(complex), std::move(z), std::move(data), target, std::move(sk), policy);
}

}  // namespace heislift
