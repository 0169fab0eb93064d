#include "heislift/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "heislift/errors.hpp"
#include "heislift/parallel.hpp"

namespace heislift {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double euclid(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// Slope at x given F(x), probing axes and q random directions.
double probe_slope(const ExtensionField& f, std::span<const double> x, const TargetPoint& fx, double h, int q,
                   std::mt19937_64& rng) {
  const int m = f.m();
  std::vector<std::vector<double>> dirs;
  for (int k = 0; k < m; ++k) {
    std::vector<double> e(m, 0.0);
    e[k] = 1.0;
    dirs.push_back(std::move(e));
  }
  for (int i = 0; i < q; ++i) dirs.push_back(random_unit(m, rng));

  double g = 0.0;
  int valid = 0;
  std::vector<double> y(m);
  for (const auto& d : dirs) {
    for (double sign : {1.0, -1.0}) {
      for (int c = 0; c < m; ++c) y[c] = x[c] + sign * h * d[c];
      if (!f.omega().contains(y)) continue;
      ++valid;
      g = std::max(g, f.target().dist(f.evaluate(y), fx) / h);
    }
  }
  if (valid == 0) throw NoValidDirection("every finite-difference probe leaves omega");
  return g;
}

}  // namespace

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

std::vector<double> uniform_in_box(const Box& box, std::mt19937_64& rng) {
  std::vector<double> x(box.dim());
  for (int c = 0; c < box.dim(); ++c) x[c] = std::uniform_real_distribution<double>(box.lo[c], box.hi[c])(rng);
  return x;
}

std::vector<double> random_unit(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> u(m);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& c : u) {
      c = normal(rng);
      norm += c * c;
    }
  } while (norm < 1e-24);
  norm = std::sqrt(norm);
  for (double& c : u) c /= norm;
  return u;
}

SlopeSample slope_at(const ExtensionField& f, std::span<const double> x, double h, int q, std::mt19937_64& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("slope_at: step must be positive");
  const Evaluation ev = f.evaluate_detailed(x);
  SlopeSample s{std::vector<double>(x.begin(), x.end()), h, 0.0, ev.kind};
  s.g_hat = probe_slope(f, x, ev.value, h, q, rng);
  return s;
}

SlopeSample slope_sample(const ExtensionField& f, std::uint64_t seed, std::uint64_t index, const SlopeOptions& opt) {
  auto rng = sample_rng(seed, index);
  SlopeSample s;
  s.x = uniform_in_box(f.omega(), rng);
  const Evaluation ev = f.evaluate_detailed(s.x);
  s.kind = ev.kind;
  if (ev.kind != SampleKind::Regular) {
    s.g_hat = f.collar_slope();
    return s;
  }
  s.h = opt.h_rel * f.complex().top_diameter(static_cast<std::size_t>(ev.simplex));
  s.g_hat = probe_slope(f, s.x, ev.value, s.h, opt.q, rng);
  return s;
}

SlopeField slope_field(const ExtensionField& f, std::size_t count, std::uint64_t seed, const SlopeOptions& opt,
                       int jobs) {
  SlopeField out;
  out.g.resize(count);
  out.kinds.resize(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    const SlopeSample s = slope_sample(f, seed, i, opt);
    out.g[i] = s.g_hat;
    out.kinds[i] = s.kind;
  });
  return out;
}

SobolevReport lp_from_slopes(const SlopeField& slopes, std::size_t count, double p, const ExtensionField& f,
                             std::uint64_t seed) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp norm needs p >= 1");
  if (count == 0 || count > slopes.g.size()) throw std::invalid_argument("lp norm: bad sample count");
  SobolevReport r;
  r.p = p;
  r.samples = count;
  r.seed = seed;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::pow(slopes.g[i], p);
    sum += v;
    sum_sq += v * v;
    r.collar_samples += slopes.kinds[i] == SampleKind::Collar;
    r.singular_samples += slopes.kinds[i] == SampleKind::Singular;
  }
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  const double var = count > 1 ? std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0)) : 0.0;
  const double volume = f.omega().volume();
  r.estimate = std::pow(volume * mean, 1.0 / p);
  r.std_error = mean > 0.0 ? r.estimate * std::sqrt(var / n) / (p * mean) : 0.0;
  const double scale = f.data().lipschitz * std::pow(f.omega().diameter(), f.m() / p);
  r.bound_ratio = scale > 0.0 ? r.estimate / scale : 0.0;
  return r;
}

SobolevReport lp_norm(const ExtensionField& f, double p, std::size_t samples, std::uint64_t seed,
                      const SlopeOptions& opt, int jobs) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp norm needs p >= 1");
  return lp_from_slopes(slope_field(f, samples, seed, opt, jobs), samples, p, f, seed);
}

SweepReport p_sweep(const ExtensionField& f, const std::vector<double>& p_list, std::size_t samples,
                    std::uint64_t seed, const SlopeOptions& opt, int jobs) {
  if (p_list.empty()) throw std::invalid_argument("p_sweep: empty p list");
  if (!std::is_sorted(p_list.begin(), p_list.end())) throw std::invalid_argument("p_sweep: p list must be ascending");
  const SlopeField slopes = slope_field(f, 16 * samples, seed, opt, jobs);
  SweepReport r;
  r.p_max = p_list.back();
  for (double p : p_list) {
    r.rows.push_back(lp_from_slopes(slopes, samples, p, f, seed));
    r.refinement.push_back({r.rows.back(), lp_from_slopes(slopes, 4 * samples, p, f, seed),
                            lp_from_slopes(slopes, 16 * samples, p, f, seed)});
  }
  const auto& top = r.refinement.back();
  r.p_max_increasing = top[0].estimate < top[1].estimate && top[1].estimate < top[2].estimate;
  return r;
}

std::vector<Segment> random_segments(const Box& omega, std::size_t count, std::uint64_t seed) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = sample_rng(seed, i);
    Segment s;
    s.a = uniform_in_box(omega, rng);
    s.b = uniform_in_box(omega, rng);
    out.push_back(std::move(s));
  }
  return out;
}

double path_contact_residual(const std::vector<TargetPoint>& values) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const auto& a = values[i];
    const auto& b = values[i + 1];
    const std::size_t hz = a.size() - 1;
    const double dt = b[hz] - a[hz];
    total += std::abs(dt - lift_increment(std::span(a).first(hz), std::span(b).first(hz)));
  }
  return total;
}

ContactReport contact_residual(const ExtensionField& f, const std::vector<Segment>& lines, double h) {
  if (f.target().kind() != TargetKind::Heisenberg) {
    throw std::invalid_argument("contact residual needs a Heisenberg target");
  }
  if (!(h > 0.0)) throw std::invalid_argument("contact residual: step must be positive");
  ContactReport r;
  r.h = h;
  for (const auto& line : lines) {
    const double len = euclid(line.a, line.b);
    if (len == 0.0) continue;
    const int steps = std::max(1, static_cast<int>(std::ceil(len / h)));
    r.per_line.push_back(path_contact_residual(f.eval_on_segment(line.a, line.b, steps).values) / len);
    r.per_line_half.push_back(path_contact_residual(f.eval_on_segment(line.a, line.b, 2 * steps).values) / len);
  }
  r.median = median(r.per_line);
  r.median_half = median(r.per_line_half);
  for (double v : r.per_line) r.max = std::max(r.max, v);
  for (double v : r.per_line_half) r.max_half = std::max(r.max_half, v);
  return r;
}

TraceReport trace_check(const ExtensionField& f, std::size_t samples, std::uint64_t seed) {
  TraceReport r;
  r.samples = samples;
  r.bound = f.collar_slope();
  const auto& z = f.sites();
  const double lo = f.collar();
  const double hi = 10.0 * f.collar();
  for (std::size_t i = 0; i < samples; ++i) {
    auto rng = sample_rng(seed, i);
    std::vector<double> x(f.m());
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      const std::size_t site = std::uniform_int_distribution<std::size_t>(0, z.size() - 1)(rng);
      const double radius = std::uniform_real_distribution<double>(lo, hi)(rng);
      const auto u = random_unit(f.m(), rng);
      for (int c = 0; c < f.m(); ++c) x[c] = z.point(site)[c] + radius * u[c];
      found = f.omega().contains(x);
    }
    if (!found) continue;
    const auto near = z.nearest(x);
    if (near.distance == 0.0) continue;
    const double ratio = f.target().dist(f.evaluate(x), f.data().values[near.index]) / near.distance;
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (ratio > r.bound * (1.0 + 1e-12)) ++r.violations;
  }
  return r;
}

DominationReport slope_domination_check(const ExtensionField& f, std::size_t functions, std::size_t points,
                                        std::uint64_t seed, const SlopeOptions& opt, int jobs) {
  if (f.target().kind() != TargetKind::Heisenberg) {
    throw std::invalid_argument("slope domination check needs a Heisenberg target");
  }
  DominationReport r;
  r.functions = functions;
  const int m = f.m();
  const auto& values = f.data().values;
  const std::size_t dim = values.front().size();

  // Centers p_i: data values moved by Gaussian noise on the scale of their spread.
  std::vector<double> spread(dim, 0.0);
  for (std::size_t c = 0; c < dim; ++c) {
    double mean = 0.0;
    for (const auto& v : values) mean += v[c] / values.size();
    for (const auto& v : values) spread[c] += (v[c] - mean) * (v[c] - mean) / values.size();
    spread[c] = std::sqrt(spread[c]) + 1e-3;
  }
  std::vector<TargetPoint> centers;
  for (std::size_t i = 0; i < functions; ++i) {
    auto rng = sample_rng(seed ^ 0x5eedULL, i);
    TargetPoint p = values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)];
    std::normal_distribution<double> normal;
    for (std::size_t c = 0; c < dim; ++c) p[c] += spread[c] * normal(rng);
    centers.push_back(std::move(p));
  }

  // Candidates are drawn in fixed-size rounds until enough regular points exist.
  std::size_t next = 0;
  while (r.points < points) {
    const std::size_t batch = std::max<std::size_t>(points - r.points, 64) + (points - r.points) / 4;
    std::vector<char> regular(batch, 0);
    std::vector<double> ratio(batch, 0.0);
    std::vector<std::size_t> violations(batch, 0);
    std::vector<std::size_t> compared(batch, 0);
    parallel_for(batch, jobs, [&](std::size_t b) {
      auto rng = sample_rng(seed, next + b);
      const auto x = uniform_in_box(f.omega(), rng);
      const Evaluation ev = f.evaluate_detailed(x);
      if (ev.kind != SampleKind::Regular) return;
      regular[b] = 1;
      const double h = opt.h_rel * f.complex().top_diameter(static_cast<std::size_t>(ev.simplex));
      const double g = probe_slope(f, x, ev.value, h, opt.q, rng);
      std::vector<double> y(x);
      for (int k = 0; k < m; ++k) {
        TargetPoint plus, minus;
        y = x;
        y[k] = x[k] + h;
        const bool has_plus = f.omega().contains(y);
        if (has_plus) plus = f.evaluate(y);
        y[k] = x[k] - h;
        const bool has_minus = f.omega().contains(y);
        if (has_minus) minus = f.evaluate(y);
        for (const auto& p : centers) {
          double deriv = 0.0;
          const auto phi = [&](const TargetPoint& v) { return koranyi_dist_flat(v, p); };
          if (has_plus && has_minus) {
            deriv = std::abs(phi(plus) - phi(minus)) / (2.0 * h);
          } else if (has_plus) {
            deriv = std::abs(phi(plus) - phi(ev.value)) / h;
          } else if (has_minus) {
            deriv = std::abs(phi(minus) - phi(ev.value)) / h;
          } else {
            continue;
          }
          ++compared[b];
          if (deriv > r.tolerance * g + 1e-12) ++violations[b];
          if (g > 0.0) ratio[b] = std::max(ratio[b], deriv / g);
        }
      }
    });
    for (std::size_t b = 0; b < batch && r.points < points; ++b) {
      if (!regular[b]) continue;
      ++r.points;
      r.comparisons += compared[b];
      r.violations += violations[b];
      r.max_ratio = std::max(r.max_ratio, ratio[b]);
    }
    next += batch;
  }
  return r;
}

void to_json(nlohmann::json& j, const SobolevReport& r) {
  j = nlohmann::json{{"p", r.p},
                     {"samples", r.samples},
                     {"seed", r.seed},
                     {"estimate", r.estimate},
                     {"std_error", r.std_error},
                     {"bound_ratio", r.bound_ratio},
                     {"collar_samples", r.collar_samples},
                     {"singular_samples", r.singular_samples},
                     {"estimator", "finite-difference lower estimate g_hat"}};
}

void to_json(nlohmann::json& j, const SweepReport& r) {
  nlohmann::json refinement = nlohmann::json::array();
  for (const auto& row : r.refinement) refinement.push_back({row[0], row[1], row[2]});
  j = nlohmann::json{{"rows", r.rows},
                     {"refinement", refinement},
                     {"p_max", r.p_max},
                     {"p_max_increasing", r.p_max_increasing}};
}

void to_json(nlohmann::json& j, const ContactReport& r) {
  j = nlohmann::json{{"h", r.h},
                     {"lines", r.per_line.size()},
                     {"median", r.median},
                     {"max", r.max},
                     {"median_half_step", r.median_half},
                     {"max_half_step", r.max_half},
                     {"per_line", r.per_line},
                     {"per_line_half_step", r.per_line_half}};
}

void to_json(nlohmann::json& j, const TraceReport& r) {
  j = nlohmann::json{{"samples", r.samples},
                     {"max_ratio", r.max_ratio},
                     {"bound", r.bound},
                     {"violations", r.violations}};
}

void to_json(nlohmann::json& j, const DominationReport& r) {
  j = nlohmann::json{{"points", r.points},         {"functions", r.functions}, {"comparisons", r.comparisons},
                     {"violations", r.violations}, {"max_ratio", r.max_ratio}, {"tolerance", r.tolerance}};
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "p,estimate\n";
  for (const auto& row : r.rows) os << row.p << ',' << row.estimate << '\n';
  return os.str();
}

}  // namespace heislift
