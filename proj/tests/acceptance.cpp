// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "heislift/analyze.hpp"
#include "heislift/heis_core.hpp"
#include "heislift/pipeline.hpp"

using namespace heislift;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool passed = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<std::vector<double>> random_sites(std::uint64_t seed, int m, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<std::vector<double>> pts(count, std::vector<double>(m));
  for (auto& p : pts) {
    for (double& c : p) c = u(rng);
  }
  return pts;
}

Box cube_box(int m) { return Box{std::vector<double>(m, -1.0), std::vector<double>(m, 1.0)}; }

struct Instance {
  int m;
  int sites;
  int generation;
  std::uint64_t seed;
};

// Criteria 1 and 2 share these.
const std::vector<Instance> kInstances{{2, 10, 9, 101}, {2, 60, 9, 102}, {2, 200, 9, 103},
                                       {3, 10, 5, 201}, {3, 60, 5, 202}, {3, 200, 5, 203}};

Verdict whitney_and_size() {
  Verdict v;
  std::ostringstream d;
  for (const Instance& in : kInstances) {
    const auto t0 = Clock::now();
    const CompactSet z(random_sites(in.seed, in.m, in.sites));
    const Decomposition dec = decompose(z, cube_box(in.m), in.generation);
    const WhitneyReport w = verify_whitney(dec, z);
    const QualityReport q = quality_report(build_complex(dec), z);
    const double secs = seconds_since(t0);
    const bool ok = w.min_ratio >= 1.0 - 1e-12 && w.max_ratio <= 4.0 && q.size_ok() && secs <= 30.0;
    v.passed = v.passed && ok;
    d << " m" << in.m << "/" << in.sites << ":[" << fmt(w.min_ratio) << "," << fmt(w.max_ratio) << "] size["
      << fmt(q.min_size_lower) << "," << fmt(q.max_size_upper) << "<=" << fmt(q.size_limit) << "] " << fmt(secs)
      << "s";
  }
  v.detail = "d(Q,Z)/diam(Q) in [1,4], diam(s) <= d(s,Z) <= 12 sqrt(m) diam(s), <= 30 s;" + d.str();
  return v;
}

Verdict complex_flatness() {
  // Measured flatness constants, one per m.
  const double d2_limit[4] = {0.0, 0.0, 12.0, 12.0 * std::sqrt(3.0)};
  Verdict v;
  std::ostringstream d;
  double worst[4] = {0, 0, 0, 0};
  for (const Instance& in : kInstances) {
    const CompactSet z(random_sites(in.seed, in.m, in.sites));
    std::size_t classes[2] = {0, 0};
    for (int level = 0; level < 2; ++level) {
      const SimplicialComplex c = build_complex(decompose(z, cube_box(in.m), in.generation - 1 + level));
      const ComplexValidation val = validate_complex(c);
      const QualityReport q = quality_report(c, z);
      classes[level] = q.class_count();
      worst[in.m] = std::max(worst[in.m], q.max_diam_over_beta);
      v.passed = v.passed && val.violations() == 0 && q.degenerate == 0 &&
                 q.max_diam_over_beta <= d2_limit[in.m] * (1.0 + 1e-9);
      if (val.violations() != 0) d << " violations(m" << in.m << "/" << in.sites << ")=" << val.violations();
    }
    v.passed = v.passed && classes[0] == classes[1];
    d << " m" << in.m << "/" << in.sites << ":classes " << classes[0] << "->" << classes[1];
  }
  v.detail = "no conformity violations, class count stable under refinement, diam/beta <= 12 (m=2), 12 sqrt 3 (m=3); "
             "measured " + fmt(worst[2]) + ", " + fmt(worst[3]) + ";" + d.str();
  return v;
}

Verdict heisenberg_core() {
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto point = [&] { return HPoint({u(rng), u(rng)}, u(rng)); };
  auto close = [](const HPoint& a, const HPoint& b) {
    double e = std::abs(a.t - b.t);
    for (std::size_t i = 0; i < a.h.size(); ++i) e = std::max(e, std::abs(a.h[i] - b.h[i]));
    return e;
  };
  double axiom_err = 0.0, invariance_err = 0.0, dilation_err = 0.0, lift_err = 0.0, worst_ratio = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const HPoint p = point(), q = point(), r = point();
    axiom_err = std::max(axiom_err, close(group_mul(group_mul(p, q), r), group_mul(p, group_mul(q, r))));
    axiom_err = std::max(axiom_err, close(group_mul(p, group_inv(p)), HPoint::identity(1)));
    axiom_err = std::max(axiom_err, close(group_mul(HPoint::identity(1), p), p));
    const double dpq = koranyi_dist(p, q);
    invariance_err = std::max(invariance_err, std::abs(koranyi_dist(group_mul(r, p), group_mul(r, q)) - dpq));
    const double lambda = std::exp(u(rng));
    dilation_err =
        std::max(dilation_err, std::abs(koranyi_dist(dilate(p, lambda), dilate(q, lambda)) - lambda * dpq) / lambda);
    // Exact lift of the connecting path against midpoint quadrature.
    const HorizontalPath path = connect_points(p, q);
    lift_err = std::max(lift_err, close(path.end(), q));
    const auto& vs = path.vertices();
    double t = p.t;
    for (std::size_t s = 0; s + 1 < vs.size(); ++s) {
      double quad = 0.0;
      const int steps = 200;
      for (int k = 0; k < steps; ++k) {
        const double w = (k + 0.5) / steps;
        const double x = vs[s][0] + w * (vs[s + 1][0] - vs[s][0]), y = vs[s][1] + w * (vs[s + 1][1] - vs[s][1]);
        quad += 2.0 * (y * (vs[s + 1][0] - vs[s][0]) - x * (vs[s + 1][1] - vs[s][1])) / steps;
      }
      lift_err = std::max(lift_err, std::abs(quad - lift_increment(vs[s], vs[s + 1])));
      t += quad;
    }
    lift_err = std::max(lift_err, std::abs(t - q.t));
    if (dpq > 0.0) worst_ratio = std::max(worst_ratio, path_length(path) / dpq);
  }
  const double tol = 1e-9;
  Verdict v;
  v.passed = axiom_err <= tol && invariance_err <= tol && dilation_err <= tol && lift_err <= tol &&
             worst_ratio <= gamma_h() * (1.0 + 1e-12);
  v.detail = "1e4 tuples: axioms " + fmt(axiom_err) + ", left-invariance " + fmt(invariance_err) + ", dilation " +
             fmt(dilation_err) + ", lift " + fmt(lift_err) + " (tol 1e-9); max l_H/d_K " + fmt(worst_ratio) +
             " <= gamma_H " + fmt(gamma_h());
  return v;
}

BoundaryData heis_data(const std::vector<std::vector<double>>& sites, double phase) {
  const TargetSpace y = TargetSpace::heisenberg(1);
  std::vector<TargetPoint> values;
  for (const auto& z : sites) {
    const double phi = 2.0 * z[0] + z[1] + phase;
    values.push_back({std::cos(phi), std::sin(phi), -2.0 * phi + phase * z[0]});
  }
  return BoundaryData::make(sites, values, y);
}

Verdict skeleton_bound(const ExtensionField& golden) {
  std::vector<const SkeletonMap*> maps{&golden.skeleton()};
  std::vector<double> lips{golden.data().lipschitz};
  std::vector<ExtensionField> extra;
  for (std::uint64_t s = 0; s < 4; ++s) {
    extra.push_back(
        build_field(cube_box(2), 8, heis_data(random_sites(400 + s, 2, 15 + 20 * s), 0.3 * s), TargetSpace::heisenberg(1), 1));
  }
  for (const auto& f : extra) {
    maps.push_back(&f.skeleton());
    lips.push_back(f.data().lipschitz);
  }
  double c_tilde = 0.0;
  for (const auto* m : maps) c_tilde = std::max(c_tilde, m->c_tilde);
  Verdict v;
  std::ostringstream d;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const SkeletonMap& sk = *maps[i];
    double worst = 0.0;
    for (const auto& cell : sk.cells[1]) worst = std::max(worst, cell.lipschitz());
    // Proof bound: an edge path costs at most gamma_H times the endpoint
    // distance, which is at most C_0 L.
    const double proof = gamma_h() * sk.vertex_report.edge_bound;
    v.passed = v.passed && worst <= c_tilde * lips[i] * (1.0 + 1e-12) && sk.vertex_report.max_witness_error == 0.0 &&
               sk.vertex_report.max_edge_ratio <= sk.vertex_report.edge_bound && sk.c_tilde <= proof;
    d << " " << fmt(sk.c_tilde) << "(edge ratio " << fmt(sk.vertex_report.max_edge_ratio) << ")";
  }
  v.detail = "m=2, H^1: per-edge constants <= C~ L with C~ = " + fmt(c_tilde) +
             ", witnesses exact, C~ <= gamma_H C_0; per instance:" + d.str();
  return v;
}

Verdict trace(const ExtensionField& f) {
  const TraceReport t = trace_check(f, 10000, 1);
  Verdict v;
  v.passed = t.violations == 0 && t.max_ratio <= t.bound;
  v.detail = "N=1e4: max ratio " + fmt(t.max_ratio) + " <= L(C~+4) = " + fmt(t.bound) + ", violations " +
             std::to_string(t.violations);
  return v;
}

Verdict sobolev(const ExtensionField& f, const SweepReport& sweep, const RunConfig& cfg) {
  Verdict v;
  std::ostringstream d;
  for (std::size_t i = 0; i + 1 < sweep.rows.size(); ++i) {
    const auto& r = sweep.refinement[i];
    const double change = std::abs(r[1].estimate - r[0].estimate);
    v.passed = v.passed && change <= 3.0 * r[0].std_error;
    d << " p=" << fmt(r[0].p) << ": " << fmt(r[0].estimate) << "+-" << fmt(r[0].std_error) << " -> "
      << fmt(r[1].estimate) << " (|diff| " << fmt(change) << ")";
  }
  const SobolevReport& base = sweep.refinement[0][0];
  for (double lambda : {0.5, 2.0}) {
    std::vector<TargetPoint> values;
    for (const auto& y : f.data().values) values.push_back(f.target().dilate(y, lambda));
    const BoundaryData data = BoundaryData::make(f.data().sites, values, f.target());
    const ExtensionField g =
        build_field(cfg.omega, cfg.max_generation, data, f.target(), cfg.n, FieldPolicy{cfg.eps_sing, cfg.collar});
    const SobolevReport r = lp_norm(g, 1.0, base.samples, base.seed + 17);
    const double err = std::abs(r.estimate - lambda * base.estimate);
    const double se = std::hypot(r.std_error, lambda * base.std_error);
    v.passed = v.passed && err <= 2.0 * se;
    d << " lambda=" << fmt(lambda) << ": " << fmt(r.estimate) << " vs " << fmt(lambda * base.estimate) << " (2 SE "
      << fmt(2.0 * se) << ")";
  }
  v.detail = "N=1e5 vs 4e5 within 3 SE, dilation within 2 SE;" + d.str();
  return v;
}

Verdict blowup(const SweepReport& sweep) {
  const auto& top = sweep.refinement.back();
  const auto& mid = sweep.refinement[1];  // p = 1.5
  Verdict v;
  v.passed = sweep.p_max == 2.0 && top[0].estimate < top[1].estimate && top[1].estimate < top[2].estimate &&
             top[2].estimate > 3.0 * mid[0].estimate;
  v.detail = "p=2: N,4N,16N = " + fmt(top[0].estimate) + ", " + fmt(top[1].estimate) + ", " + fmt(top[2].estimate) +
             " (SE " + fmt(top[0].std_error) + ", " + fmt(top[1].std_error) + ", " + fmt(top[2].std_error) +
             "); need strict growth and 16N > 3 x p=1.5 estimate = " + fmt(3.0 * mid[0].estimate);
  return v;
}

Verdict contact(const ExtensionField& f) {
  const double h = 1e-3 * f.omega().diameter();
  const ContactReport r = contact_residual(f, random_segments(f.omega(), 100, 1), h);
  const double limit = 1e-3 * f.data().lipschitz;
  Verdict v;
  v.passed = r.median <= limit && r.median_half <= 0.75 * r.median;
  v.detail = "100 lines, h=" + fmt(h) + ": median " + fmt(r.median) + " (limit 1e-3 L = " + fmt(limit) +
             "), at h/2 " + fmt(r.median_half) + " (ratio " + fmt(r.median > 0 ? r.median_half / r.median : 0.0) +
             ", limit 0.75)";
  return v;
}

Verdict domination(const ExtensionField& f) {
  const DominationReport r = slope_domination_check(f, 10, 10000, 1);
  Verdict v;
  v.passed = r.violations == 0;
  v.detail = "10 functions, 1e4 points, tolerance 1.05: violations " + std::to_string(r.violations) + " of " +
             std::to_string(r.comparisons) + ", max ratio " + fmt(r.max_ratio);
  return v;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism(const fs::path& config_path) {
  const fs::path root = fs::temp_directory_path() / "heislift_acceptance";
  fs::remove_all(root);
  RunConfig cfg = load_config(config_path);
  for (const char* name : {"a", "b"}) {
    cfg.output = root / name;
    run_pipeline(cfg, 1);
  }
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    if (read_file(e.path()) != read_file(root / "b" / fs::relative(e.path(), root / "a"))) ++differ;
  }
  fs::remove_all(root);
  Verdict v;
  v.passed = files > 0 && differ == 0;
  v.detail = "two golden runs: " + std::to_string(files) + " files, " + std::to_string(differ) + " differ";
  return v;
}

}  // namespace

int main() {
  const fs::path golden_path = HEISLIFT_GOLDEN_CONFIG;
  const RunConfig cfg = load_config(golden_path);
  const BoundaryData data = read_boundary_csv(cfg.data_path, cfg.m, cfg.target());
  const ExtensionField golden =
      build_field(cfg.omega, cfg.max_generation, data, cfg.target(), cfg.n, FieldPolicy{cfg.eps_sing, cfg.collar});

  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& fn) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.passed;
    std::printf("%s %2d %s: %s [%.1f s]\n", v.passed ? "PASS" : "FAIL", id, name, v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "whitney inequalities", whitney_and_size);
  report(2, "complex validity and flatness", complex_flatness);
  report(3, "heisenberg core", heisenberg_core);
  report(4, "skeleton lipschitz bound", [&] { return skeleton_bound(golden); });
  report(5, "trace estimate", [&] { return trace(golden); });
  SweepReport sweep;
  const auto t0 = Clock::now();
  try {
    sweep = p_sweep(golden, {1.0, 1.5, 1.9, 2.0}, 100000, 1);
  } catch (const std::exception& e) {
    std::printf("p sweep threw: %s\n", e.what());
  }
  std::printf("     (p sweep with 1.6e6 samples: %.1f s)\n", seconds_since(t0));
  report(6, "sobolev finiteness and scaling", [&] { return sobolev(golden, sweep, cfg); });
  report(7, "blow-up at p = n+1", [&] { return blowup(sweep); });
  report(8, "weak contact equation", [&] { return contact(golden); });
  report(9, "slope domination", [&] { return domination(golden); });
  report(10, "determinism", [&] { return determinism(golden_path); });
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
