#pragma once

// Numerical checks on an extension field.
//
// The slope g_hat is a finite-difference lower estimate of
//   g(x) = limsup_{y -> x} d(F(x), F(y)) / |x - y|,
// taken over the 2m axis directions and q random unit directions (both
// signs) with step h = 1e-3 * diam of the local simplex. Collar and
// singular samples are assigned L (C~ + 4).
//
// Every sample i draws from its own generator seeded by (seed, i), so
// results do not depend on the number of threads.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "heislift/extend.hpp"

namespace heislift {

struct SlopeOptions {
  double h_rel = 1e-3;
  int q = 8;
};

struct SlopeSample {
  std::vector<double> x;
  double h = 0.0;
  double g_hat = 0.0;
  SampleKind kind = SampleKind::Regular;
};

/// Per-sample generator for stream `index` of `seed`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);
std::vector<double> uniform_in_box(const Box& box, std::mt19937_64& rng);
std::vector<double> random_unit(int m, std::mt19937_64& rng);

/// Throws NoValidDirection if every probe leaves Omega.
SlopeSample slope_at(const ExtensionField& f, std::span<const double> x, double h, int q, std::mt19937_64& rng);

/// Sample i: x uniform in Omega from sample_rng(seed, i); h from the local
/// simplex, or the collar value for collar and singular points.
SlopeSample slope_sample(const ExtensionField& f, std::uint64_t seed, std::uint64_t index, const SlopeOptions& opt);

struct SlopeField {
  std::vector<double> g;
  std::vector<SampleKind> kinds;
};

SlopeField slope_field(const ExtensionField& f, std::size_t count, std::uint64_t seed, const SlopeOptions& opt,
                       int jobs);

struct SobolevReport {
  double p = 1.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;     // (|Omega| mean g^p)^(1/p)
  double std_error = 0.0;    // delta method
  double bound_ratio = 0.0;  // estimate / (L diam(Omega)^(m/p))
  std::size_t collar_samples = 0;
  std::size_t singular_samples = 0;
};

/// Estimate from the first `count` slopes. Throws for p < 1.
SobolevReport lp_from_slopes(const SlopeField& slopes, std::size_t count, double p, const ExtensionField& f,
                             std::uint64_t seed);

SobolevReport lp_norm(const ExtensionField& f, double p, std::size_t samples, std::uint64_t seed,
                      const SlopeOptions& opt = {}, int jobs = 1);

struct SweepReport {
  std::vector<SobolevReport> rows;  // sample count N
  // Estimates at N, 4N, 16N for every p (the same slopes, longer prefixes).
  std::vector<std::array<SobolevReport, 3>> refinement;
  double p_max = 0.0;
  bool p_max_increasing = false;  // strict growth N -> 4N -> 16N at p_max
};

/// Slopes are drawn once for 16N samples; p = 1 at N equals lp_norm bit for bit.
SweepReport p_sweep(const ExtensionField& f, const std::vector<double>& p_list, std::size_t samples,
                    std::uint64_t seed, const SlopeOptions& opt = {}, int jobs = 1);

struct Segment {
  std::vector<double> a;
  std::vector<double> b;
};

std::vector<Segment> random_segments(const Box& omega, std::size_t count, std::uint64_t seed);

struct ContactReport {
  double h = 0.0;
  double median = 0.0;     // per unit length, step h
  double max = 0.0;
  double median_half = 0.0;  // step h / 2
  double max_half = 0.0;
  std::vector<double> per_line;
  std::vector<double> per_line_half;
};

/// Integrated residual |dt - 2 sum_j (y_j dx_j - x_j dy_j)| along each
/// segment, midpoint rule per step, divided by the segment length.
/// Throws std::invalid_argument for non-Heisenberg targets.
ContactReport contact_residual(const ExtensionField& f, const std::vector<Segment>& lines, double h);

/// Residual of one sampled target path, summed over steps.
double path_contact_residual(const std::vector<TargetPoint>& values);

struct TraceReport {
  std::size_t samples = 0;
  double max_ratio = 0.0;  // max dist(F(x), f(z_x)) / |x - z_x|
  double bound = 0.0;      // L (C~ + 4)
  std::size_t violations = 0;
};

/// x = z + r u with z a random site, r uniform in [collar, 10 collar].
TraceReport trace_check(const ExtensionField& f, std::size_t samples, std::uint64_t seed);

struct DominationReport {
  std::size_t points = 0;
  std::size_t functions = 0;
  std::size_t comparisons = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // max |d(phi o F)/dx_k| / g_hat over points with g_hat > 0
  double tolerance = 1.05;
};

/// phi_i = d_K(., p_i) for seeded random p_i near the data values.
DominationReport slope_domination_check(const ExtensionField& f, std::size_t functions, std::size_t points,
                                        std::uint64_t seed, const SlopeOptions& opt = {}, int jobs = 1);

void to_json(nlohmann::json& j, const SobolevReport& r);
void to_json(nlohmann::json& j, const SweepReport& r);
void to_json(nlohmann::json& j, const ContactReport& r);
void to_json(nlohmann::json& j, const TraceReport& r);
void to_json(nlohmann::json& j, const DominationReport& r);
/// Two columns p, estimate at N.
std::string sweep_csv(const SweepReport& r);

}  // namespace heislift
