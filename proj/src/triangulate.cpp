#include "heislift/triangulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Dense>

#include "heislift/errors.hpp"

namespace heislift {

namespace {

struct FaceKey {
  std::vector<std::int64_t> anchor;
  std::int64_t side = 0;
  std::uint32_t mask = 0;  // free axes

  friend bool operator==(const FaceKey&, const FaceKey&) = default;
};

struct FaceKeyHash {
  std::size_t operator()(const FaceKey& f) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(f.side) ^ (std::size_t{f.mask} << 48);
    for (auto v : f.anchor) h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

struct IntVecHash {
  template <typename T>
  std::size_t operator()(const std::vector<T>& v) const noexcept {
    std::size_t h = v.size();
    for (auto x : v) h ^= std::hash<T>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

using Simplices = std::vector<std::vector<int>>;

class Triangulator {
 public:
  explicit Triangulator(const Decomposition& dec) : dec_(dec), m_(dec.frame.dim()) {
    finest_ = dec.max_present_generation() + 2;
    unit_ = dec.frame.side(finest_);
  }

  std::int64_t side_units(int generation) const { return std::int64_t{1} << (finest_ - generation); }

  FaceKey cube_key(const WhitneyCube& q) const {
    FaceKey f;
    f.side = side_units(q.generation);
    f.anchor.resize(m_);
    for (int i = 0; i < m_; ++i) f.anchor[i] = q.lattice[i] * f.side;
    f.mask = (1u << m_) - 1;
    return f;
  }

  // All proper faces of dimension >= 1 of a cube.
  void for_each_face(const FaceKey& cube, auto&& fn) const {
    for (std::uint32_t mask = 1; mask < (1u << m_) - 1; ++mask) {
      const int fixed = m_ - std::popcount(mask);
      for (int offs = 0; offs < (1 << fixed); ++offs) {
        FaceKey f{cube.anchor, cube.side, mask};
        int bit = 0;
        for (int a = 0; a < m_; ++a) {
          if (mask & (1u << a)) continue;
          if ((offs >> bit++) & 1) f.anchor[a] += cube.side;
        }
        fn(f);
      }
    }
  }

  void mark_refinements() {
    std::unordered_set<FaceKey, FaceKeyHash> cube_faces;
    for (const auto& q : dec_.cubes) for_each_face(cube_key(q), [&](const FaceKey& f) { cube_faces.insert(f); });

    std::vector<FaceKey> work;
    for (const auto& q : dec_.cubes) {
      for_each_face(cube_key(q), [&](const FaceKey& f) {
        const std::int64_t parent_side = 2 * f.side;
        FaceKey parent{f.anchor, parent_side, f.mask};
        for (int a = 0; a < m_; ++a) {
          const bool free_axis = f.mask & (1u << a);
          if (free_axis) {
            parent.anchor[a] = f.anchor[a] - (f.anchor[a] % parent_side);
          } else if (f.anchor[a] % parent_side != 0) {
            return;  // the containing plane is not a coarser lattice plane
          }
        }
        if (cube_faces.count(parent) && refined_.insert(parent).second) work.push_back(parent);
      });
    }
    // A split face forces its boundary faces to split as well.
    while (!work.empty()) {
      FaceKey f = std::move(work.back());
      work.pop_back();
      if (std::popcount(f.mask) < 2) continue;
      for_each_boundary(f, [&](const FaceKey& b) {
        if (refined_.insert(b).second) work.push_back(b);
      });
    }
  }

  void for_each_boundary(const FaceKey& f, auto&& fn) const {
    for (int a = 0; a < m_; ++a) {
      if (!(f.mask & (1u << a))) continue;
      for (int off = 0; off < 2; ++off) {
        FaceKey b{f.anchor, f.side, f.mask & ~(1u << a)};
        if (off) b.anchor[a] += f.side;
        fn(b);
      }
    }
  }

  int vertex_id(const std::vector<std::int64_t>& coords) {
    auto [it, inserted] = vertices_.try_emplace(coords, static_cast<int>(vertex_list_.size()));
    if (inserted) vertex_list_.push_back(coords);
    return it->second;
  }

  const Simplices& triangulate(const FaceKey& f) {
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    Simplices out;
    const int k = std::popcount(f.mask);
    if (k == 0) {
      out.push_back({vertex_id(f.anchor)});
    } else if (refined_.count(f)) {
      const std::int64_t half = f.side / 2;
      for (std::uint32_t sub = 0; sub < (1u << k); ++sub) {
        FaceKey child{f.anchor, half, f.mask};
        int bit = 0;
        for (int a = 0; a < m_; ++a) {
          if (!(f.mask & (1u << a))) continue;
          if ((sub >> bit++) & 1) child.anchor[a] += half;
        }
        const Simplices& part = triangulate(child);
        out.insert(out.end(), part.begin(), part.end());
      }
    } else {
      std::vector<std::int64_t> center = f.anchor;
      for (int a = 0; a < m_; ++a) {
        if (f.mask & (1u << a)) center[a] += f.side / 2;
      }
      const int c = vertex_id(center);
      for_each_boundary(f, [&](const FaceKey& b) {
        // Copy: recursion may rehash the memo.
        const Simplices part = triangulate(b);
        for (auto s : part) {
          s.push_back(c);
          std::sort(s.begin(), s.end());
          out.push_back(std::move(s));
        }
      });
    }
    return memo_.emplace(f, std::move(out)).first->second;
  }

  std::vector<double> real_coords() const {
    std::vector<double> out;
    out.reserve(vertex_list_.size() * m_);
    for (const auto& v : vertex_list_) {
      for (int a = 0; a < m_; ++a) out.push_back(dec_.frame.origin[a] + static_cast<double>(v[a]) * unit_);
    }
    return out;
  }

 private:
  const Decomposition& dec_;
  int m_;
  int finest_ = 0;
  double unit_ = 1.0;
  std::unordered_set<FaceKey, FaceKeyHash> refined_;
  std::unordered_map<FaceKey, Simplices, FaceKeyHash> memo_;
  std::unordered_map<std::vector<std::int64_t>, int, IntVecHash> vertices_;
  std::vector<std::vector<std::int64_t>> vertex_list_;
};

double determinant_volume(const std::vector<std::vector<double>>& v) {
  const int m = static_cast<int>(v.size()) - 1;
  Eigen::MatrixXd e(m, m);
  for (int j = 0; j < m; ++j) {
    for (int r = 0; r < m; ++r) e(r, j) = v[j + 1][r] - v[0][r];
  }
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  return std::abs(e.determinant()) / fact;
}

// Distance from p to the affine hull of pts.
double affine_hull_distance(const std::vector<double>& p, const std::vector<const std::vector<double>*>& pts) {
  const std::size_t m = p.size();
  std::vector<std::vector<double>> basis;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    std::vector<double> e(m);
    for (std::size_t c = 0; c < m; ++c) e[c] = (*pts[i])[c] - (*pts[0])[c];
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t c = 0; c < m; ++c) dot += e[c] * b[c];
      for (std::size_t c = 0; c < m; ++c) e[c] -= dot * b[c];
    }
    double norm = 0.0;
    for (double c : e) norm += c * c;
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (double& c : e) c /= norm;
    basis.push_back(std::move(e));
  }
  std::vector<double> r(m);
  for (std::size_t c = 0; c < m; ++c) r[c] = p[c] - (*pts[0])[c];
  for (const auto& b : basis) {
    double dot = 0.0;
    for (std::size_t c = 0; c < m; ++c) dot += r[c] * b[c];
    for (std::size_t c = 0; c < m; ++c) r[c] -= dot * b[c];
  }
  double s = 0.0;
  for (double c : r) s += c * c;
  return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------

long SimplicialComplex::find_simplex(std::span<const int> sorted_vertices) const {
  const int k = static_cast<int>(sorted_vertices.size()) - 1;
  if (k < 0 || k > m_) return -1;
  auto it = lookup_[k].find(std::vector<int>(sorted_vertices.begin(), sorted_vertices.end()));
  return it == lookup_[k].end() ? -1 : it->second;
}

double SimplicialComplex::top_volume(std::size_t top) const { return determinant_volume(simplex_vertices(*this, m_, top)); }

void SimplicialComplex::barycentric(std::size_t top, std::span<const double> x, std::span<double> out) const {
  const int v0 = simplices_[m_][top * (m_ + 1)];
  const double* inv = bary_inverse_.data() + top * m_ * m_;
  const double* base = vertex_coords_.data() + static_cast<std::size_t>(v0) * m_;
  double rest = 1.0;
  for (int r = 0; r < m_; ++r) {
    double s = 0.0;
    for (int c = 0; c < m_; ++c) s += inv[r * m_ + c] * (x[c] - base[c]);
    out[r + 1] = s;
    rest -= s;
  }
  out[0] = rest;
}

std::optional<SimplicialComplex::Location> SimplicialComplex::try_locate(std::span<const double> x) const {
  Location loc;
  loc.bary.resize(m_ + 1);
  for (std::size_t cube : dec_.cubes_containing(x)) {
    for (std::size_t s = cube_begin_[cube]; s < cube_begin_[cube + 1]; ++s) {
      barycentric(s, x, loc.bary);
      bool inside = true;
      for (double b : loc.bary) inside = inside && b >= -1e-12;
      if (inside) {
        loc.simplex = s;
        return loc;
      }
    }
  }
  return std::nullopt;
}

SimplicialComplex::Location SimplicialComplex::locate(std::span<const double> x) const {
  auto loc = try_locate(x);
  if (!loc) throw NotCovered("point is outside every accepted Whitney cube");
  return *std::move(loc);
}

void SimplicialComplex::finalize() {
  const std::size_t tops = simplex_count(m_);
  const std::size_t width = std::size_t{1} << (m_ + 1);
  face_table_.assign(tops * width, -1);
  for (int k = 0; k < m_; ++k) simplices_[k].clear();
  lookup_.assign(m_ + 1, {});
  std::vector<int> sub;
  for (std::size_t t = 0; t < tops; ++t) {
    const auto verts = simplex(m_, t);
    for (unsigned mask = 1; mask < width; ++mask) {
      sub.clear();
      for (int i = 0; i <= m_; ++i) {
        if (mask & (1u << i)) sub.push_back(verts[i]);
      }
      const int k = static_cast<int>(sub.size()) - 1;
      const int next = k == m_ ? static_cast<int>(t) : static_cast<int>(simplex_count(k));
      auto [it, inserted] = lookup_[k].try_emplace(sub, next);
      if (inserted && k < m_) simplices_[k].insert(simplices_[k].end(), sub.begin(), sub.end());
      face_table_[t * width + mask] = it->second;
    }
  }

  top_diam_.resize(tops);
  bary_inverse_.resize(tops * m_ * m_);
  for (std::size_t t = 0; t < tops; ++t) {
    const auto v = simplex_vertices(*this, m_, t);
    double diam = 0.0;
    for (int i = 0; i <= m_; ++i) {
      for (int j = i + 1; j <= m_; ++j) {
        double d2 = 0.0;
        for (int c = 0; c < m_; ++c) d2 += (v[i][c] - v[j][c]) * (v[i][c] - v[j][c]);
        diam = std::max(diam, std::sqrt(d2));
      }
    }
    top_diam_[t] = diam;
    Eigen::MatrixXd e(m_, m_);
    for (int j = 0; j < m_; ++j) {
      for (int r = 0; r < m_; ++r) e(r, j) = v[j + 1][r] - v[0][r];
    }
    const Eigen::MatrixXd inv = e.inverse();
    for (int r = 0; r < m_; ++r) {
      for (int c = 0; c < m_; ++c) bary_inverse_[t * m_ * m_ + r * m_ + c] = inv(r, c);
    }
  }
}

std::vector<std::vector<double>> simplex_vertices(const SimplicialComplex& complex, int k, std::size_t id) {
  std::vector<std::vector<double>> out;
  for (int v : complex.simplex(k, id)) {
    const auto p = complex.vertex(v);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

SimplicialComplex build_complex(const Decomposition& dec) {
  const int m = dec.frame.dim();
  if (m < 1) throw std::invalid_argument("decomposition has no dimension");
  if (!dec.cubes.empty() && neighbor_stats(dec).max_generation_jump > 1) {
    throw std::invalid_argument("touching Whitney cubes differ by more than one generation");
  }

  SimplicialComplex sc;
  sc.m_ = m;
  sc.dec_ = dec;
  sc.dec_.build_index();
  sc.simplices_.assign(m + 1, {});

  Triangulator tri(dec);
  tri.mark_refinements();
  sc.cube_begin_.push_back(0);
  for (std::size_t ci = 0; ci < dec.cubes.size(); ++ci) {
    for (const auto& s : tri.triangulate(tri.cube_key(dec.cubes[ci]))) {
      sc.simplices_[m].insert(sc.simplices_[m].end(), s.begin(), s.end());
      sc.parent_cube_.push_back(ci);
    }
    sc.cube_begin_.push_back(sc.parent_cube_.size());
  }
  sc.vertex_coords_ = tri.real_coords();
  sc.finalize();

  const auto v = validate_complex(sc);
  if (v.violations() > 0) {
    throw ConstructionError("simplicial complex failed conformity validation", v.first_bad, v.second_bad);
  }
  return sc;
}

ComplexValidation validate_complex(const SimplicialComplex& sc) {
  ComplexValidation out;
  const int m = sc.dim();
  const std::size_t tops = sc.simplex_count(m);
  const std::size_t width = std::size_t{1} << (m + 1);
  auto flag = [&](long a, long b) {
    if (out.first_bad < 0) {
      out.first_bad = a;
      out.second_bad = b;
    }
  };

  // Facet incidence: at most two cofaces, on opposite sides.
  std::vector<std::vector<std::size_t>> cofaces(sc.simplex_count(m - 1));
  for (std::size_t t = 0; t < tops; ++t) {
    for (int i = 0; i <= m; ++i) {
      const unsigned mask = static_cast<unsigned>(width - 1) & ~(1u << i);
      cofaces[sc.face_id(t, mask)].push_back(t);
    }
  }
  std::vector<double> bary(m + 1);
  for (std::size_t f = 0; f < cofaces.size(); ++f) {
    const auto& cf = cofaces[f];
    if (cf.size() > 2) {
      ++out.facet_overuse;
      flag(static_cast<long>(cf[0]), static_cast<long>(cf[2]));
      continue;
    }
    if (cf.size() == 2) {
      const auto facet = sc.simplex(m - 1, f);
      const auto other = sc.simplex(m, cf[1]);
      int apex = -1;
      for (int v : other) {
        if (std::find(facet.begin(), facet.end(), v) == facet.end()) apex = v;
      }
      sc.barycentric(cf[0], sc.vertex(apex), bary);
      const auto first = sc.simplex(m, cf[0]);
      for (int i = 0; i <= m; ++i) {
        if (std::find(facet.begin(), facet.end(), first[i]) == facet.end() && bary[i] >= -1e-12) {
          ++out.same_side_pairs;
          flag(static_cast<long>(cf[0]), static_cast<long>(cf[1]));
        }
      }
    }
  }

  // Volumes partition each cube.
  const auto& dec = sc.decomposition();
  for (std::size_t c = 0; c < dec.cubes.size(); ++c) {
    const auto [b, e] = sc.cube_simplices(c);
    double vol = 0.0;
    for (std::size_t t = b; t < e; ++t) {
      const double v = sc.top_volume(t);
      if (!(v > 0.0)) {
        ++out.degenerate;
        flag(static_cast<long>(t), static_cast<long>(t));
      }
      vol += v;
    }
    const double cube_vol = dec.cubes[c].box(dec.frame).volume();
    out.max_volume_error = std::max(out.max_volume_error, std::abs(vol - cube_vol) / cube_vol);
  }

  // A vertex inside a closed simplex must be one of its vertices.
  for (std::size_t v = 0; v < sc.vertex_count(); ++v) {
    const auto p = sc.vertex(v);
    for (std::size_t cube : dec.cubes_containing(p)) {
      const auto [b, e] = sc.cube_simplices(cube);
      for (std::size_t t = b; t < e; ++t) {
        const auto verts = sc.simplex(m, t);
        if (std::find(verts.begin(), verts.end(), static_cast<int>(v)) != verts.end()) continue;
        sc.barycentric(t, p, bary);
        bool inside = true;
        for (double x : bary) inside = inside && x >= -1e-12;
        if (inside) {
          ++out.hanging_vertices;
          flag(static_cast<long>(t), -static_cast<long>(v) - 1);
        }
      }
    }
  }

  // Distinct vertex ids never share coordinates.
  std::vector<std::size_t> order(sc.vertex_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto coord_less = [&](std::size_t a, std::size_t b) {
    const auto pa = sc.vertex(a);
    const auto pb = sc.vertex(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::sort(order.begin(), order.end(), coord_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto pa = sc.vertex(order[i - 1]);
    const auto pb = sc.vertex(order[i]);
    double d = 0.0;
    for (int c = 0; c < m; ++c) d = std::max(d, std::abs(pa[c] - pb[c]));
    if (d <= 1e-12) {
      ++out.duplicate_vertices;
      flag(-static_cast<long>(order[i - 1]) - 1, -static_cast<long>(order[i]) - 1);
    }
  }
  return out;
}

SimplexShape simplex_shape(const std::vector<std::vector<double>>& v) {
  const int m = static_cast<int>(v.size()) - 1;
  SimplexShape s;
  s.beta = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= m; ++i) {
    for (int j = i + 1; j <= m; ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < v[i].size(); ++c) d2 += (v[i][c] - v[j][c]) * (v[i][c] - v[j][c]);
      s.diam = std::max(s.diam, std::sqrt(d2));
    }
  }
  // Every face omega of dimension l >= 1: distances from its barycenter to
  // the planes of its (l-1)-faces.
  for (unsigned mask = 1; mask < (1u << (m + 1)); ++mask) {
    const int l = std::popcount(mask) - 1;
    if (l < 1) continue;
    std::vector<const std::vector<double>*> face;
    for (int i = 0; i <= m; ++i) {
      if (mask & (1u << i)) face.push_back(&v[i]);
    }
    std::vector<double> center(v[0].size(), 0.0);
    for (const auto* p : face) {
      for (std::size_t c = 0; c < center.size(); ++c) center[c] += (*p)[c] / (l + 1);
    }
    for (int drop = 0; drop <= l; ++drop) {
      std::vector<const std::vector<double>*> facet;
      for (int i = 0; i <= l; ++i) {
        if (i != drop) facet.push_back(face[i]);
      }
      const double d = affine_hull_distance(center, facet);
      s.beta = std::min(s.beta, d);
      s.big_b = std::max(s.big_b, d);
    }
  }
  return s;
}

std::vector<double> edge_profile(const std::vector<std::vector<double>>& v) {
  std::vector<double> lengths;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < v[i].size(); ++c) d2 += (v[i][c] - v[j][c]) * (v[i][c] - v[j][c]);
      lengths.push_back(std::sqrt(d2));
    }
  }
  std::sort(lengths.begin(), lengths.end());
  const double scale = lengths.back();
  for (double& l : lengths) l /= scale;
  return lengths;
}

std::size_t SimilarityClasses::classify(const std::vector<double>& profile) {
  for (std::size_t id = 0; id < reps_.size(); ++id) {
    const auto& r = reps_[id];
    if (r.size() != profile.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < r.size() && same; ++i) same = std::abs(r[i] - profile[i]) <= 1e-9;
    if (same) return id;
  }
  reps_.push_back(profile);
  return reps_.size() - 1;
}

QualityReport quality_report(const SimplicialComplex& sc, const CompactSet& z) {
  const int m = sc.dim();
  QualityReport q;
  q.size_limit = 12.0 * std::sqrt(static_cast<double>(m));
  q.simplex_count = sc.simplex_count(m);
  q.min_diam_over_beta = q.min_diam_over_bigb = q.min_size_lower = std::numeric_limits<double>::infinity();

  std::vector<double> vertex_dist(sc.vertex_count());
  for (std::size_t v = 0; v < vertex_dist.size(); ++v) vertex_dist[v] = z.distance(sc.vertex(v));

  // Shape ratios are similarity invariants, so each class is measured once.
  std::vector<std::pair<double, double>> class_ratios;
  const auto& dec = sc.decomposition();
  for (std::size_t t = 0; t < q.simplex_count; ++t) {
    const auto verts = simplex_vertices(sc, m, t);
    const double vol = sc.top_volume(t);
    if (!(vol > 0.0)) {
      ++q.degenerate;
      continue;
    }
    const std::size_t id = q.classes.classify(edge_profile(verts));
    if (id == class_ratios.size()) {
      const SimplexShape s = simplex_shape(verts);
      class_ratios.emplace_back(s.diam / s.beta, s.diam / s.big_b);
      q.class_members.push_back(0);
    }
    ++q.class_members[id];
    const auto [over_beta, over_b] = class_ratios[id];
    q.min_diam_over_beta = std::min(q.min_diam_over_beta, over_beta);
    q.max_diam_over_beta = std::max(q.max_diam_over_beta, over_beta);
    q.min_diam_over_bigb = std::min(q.min_diam_over_bigb, over_b);
    q.max_diam_over_bigb = std::max(q.max_diam_over_bigb, over_b);

    const double diam = sc.top_diameter(t);
    double upper = std::numeric_limits<double>::infinity();
    for (int v : sc.simplex(m, t)) upper = std::min(upper, vertex_dist[v]);
    q.min_size_lower = std::min(q.min_size_lower, dec.cube_distance[sc.parent_cube(t)] / diam);
    q.max_size_upper = std::max(q.max_size_upper, upper / diam);
  }
  if (q.simplex_count == 0) q.min_diam_over_beta = q.min_diam_over_bigb = q.min_size_lower = 0.0;
  return q;
}

nlohmann::json complex_to_json(const SimplicialComplex& sc) {
  const int m = sc.dim();
  nlohmann::json verts = nlohmann::json::array();
  for (std::size_t v = 0; v < sc.vertex_count(); ++v) {
    const auto p = sc.vertex(v);
    verts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  nlohmann::json by_dim = nlohmann::json::array();
  for (int k = 0; k <= m; ++k) {
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < sc.simplex_count(k); ++i) {
      const auto s = sc.simplex(k, i);
      list.push_back(std::vector<int>(s.begin(), s.end()));
    }
    by_dim.push_back(std::move(list));
  }
  std::vector<std::size_t> parents;
  for (std::size_t t = 0; t < sc.simplex_count(m); ++t) parents.push_back(sc.parent_cube(t));
  return nlohmann::json{{"dim", m}, {"vertices", verts}, {"simplices", by_dim}, {"parent_cube", parents}};
}

SimplicialComplex complex_from_json(const nlohmann::json& j, const Decomposition& dec) {
  SimplicialComplex sc = build_complex(dec);
  const int m = j.at("dim").get<int>();
  if (m != sc.dim()) throw std::invalid_argument("stored complex dimension does not match the cubes");
  const auto& verts = j.at("vertices");
  if (verts.size() != sc.vertex_count()) throw std::invalid_argument("stored complex vertex count differs");
  for (std::size_t v = 0; v < sc.vertex_count(); ++v) {
    const auto stored = verts[v].get<std::vector<double>>();
    const auto p = sc.vertex(v);
    if (!std::equal(stored.begin(), stored.end(), p.begin(), p.end())) {
      throw std::invalid_argument("stored complex vertex " + std::to_string(v) + " differs");
    }
  }
  const auto& tops = j.at("simplices").at(m);
  if (tops.size() != sc.simplex_count(m)) throw std::invalid_argument("stored complex simplex count differs");
  for (std::size_t t = 0; t < tops.size(); ++t) {
    const auto stored = tops[t].get<std::vector<int>>();
    const auto s = sc.simplex(m, t);
    if (!std::equal(stored.begin(), stored.end(), s.begin(), s.end())) {
      throw std::invalid_argument("stored complex simplex " + std::to_string(t) + " differs");
    }
  }
  return sc;
}

std::string complex_to_off(const SimplicialComplex& sc) {
  std::ostringstream os;
  os.precision(17);
  const int k = std::min(2, sc.dim());
  os << "OFF\n" << sc.vertex_count() << ' ' << (k == 2 ? sc.simplex_count(2) : 0) << " 0\n";
  for (std::size_t v = 0; v < sc.vertex_count(); ++v) {
    const auto p = sc.vertex(v);
    for (int c = 0; c < 3; ++c) os << (c ? " " : "") << (c < sc.dim() ? p[c] : 0.0);
    os << '\n';
  }
  if (k == 2) {
    for (std::size_t f = 0; f < sc.simplex_count(2); ++f) {
      const auto s = sc.simplex(2, f);
      os << "3 " << s[0] << ' ' << s[1] << ' ' << s[2] << '\n';
    }
  }
  return os.str();
}

void to_json(nlohmann::json& j, const QualityReport& q) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t id = 0; id < q.classes.size(); ++id) {
    classes.push_back({{"edge_profile", q.classes.representative(id)}, {"count", q.class_members[id]}});
  }
  j = nlohmann::json{{"simplex_count", q.simplex_count},
                     {"degenerate", q.degenerate},
                     {"diam_over_beta", {{"min", q.min_diam_over_beta}, {"max", q.max_diam_over_beta}}},
                     {"diam_over_B", {{"min", q.min_diam_over_bigb}, {"max", q.max_diam_over_bigb}}},
                     {"size", {{"min_lower_ratio", q.min_size_lower},
                               {"max_upper_ratio", q.max_size_upper},
                               {"limit", q.size_limit},
                               {"ok", q.size_ok()}}},
                     {"class_count", q.class_count()},
                     {"classes", classes}};
}

void to_json(nlohmann::json& j, const ComplexValidation& v) {
  j = nlohmann::json{{"facet_overuse", v.facet_overuse},
                     {"same_side_pairs", v.same_side_pairs},
                     {"hanging_vertices", v.hanging_vertices},
                     {"degenerate", v.degenerate},
                     {"duplicate_vertices", v.duplicate_vertices},
                     {"max_volume_error", v.max_volume_error},
                     {"violations", v.violations()}};
}

}  // namespace heislift
