#pragma once

// Extension of a Lipschitz map f: Z -> Y over Omega.
//
// Vertices of the triangulation take the value of a nearest site. The map is
// then extended over the k-simplices for k = 1..n with the target's fills,
// and each m-simplex is pushed onto its n-skeleton by the radial projections
// P^{n+1} o ... o P^m from face barycenters. Near Z (inside the collar, or in
// cubes the finite decomposition did not resolve) F is f(nearest site), and
// on the projection centers it is a fixed constant.

#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "heislift/metric_oracle.hpp"
#include "heislift/triangulate.hpp"
#include "heislift/whitney.hpp"

namespace heislift {

struct BoundaryData {
  std::vector<std::vector<double>> sites;
  std::vector<TargetPoint> values;
  double lipschitz = 0.0;  // max over pairs of dist(f(z_i), f(z_j)) / |z_i - z_j|

  /// Checks shapes against the target and measures the Lipschitz constant.
  static BoundaryData make(std::vector<std::vector<double>> sites, std::vector<TargetPoint> values,
                           const TargetSpace& target);
};

struct VertexAssignment {
  std::size_t site = 0;   // index of a nearest site, lowest index on ties
  double distance = 0.0;  // |z_a - a|
};

/// Extremes of the vertex assignment over the edges of the complex.
struct VertexReport {
  double max_edge_ratio = 0.0;  // max dist(f(z_a), f(z_b)) / (L |a - b|)
  double edge_bound = 0.0;      // D_2 (12 sqrt(m) + 1) + 1
  double max_witness_error = 0.0;  // max | |z_a - a| - d(a, Z) |
};

std::vector<VertexAssignment> assign_vertices(const SimplicialComplex& complex, const CompactSet& z);

struct SkeletonMap {
  int n = 1;
  std::vector<VertexAssignment> vertices;
  std::vector<TargetPoint> vertex_values;
  std::vector<std::vector<CellMap>> cells;  // cells[k][id] for k = 1..n
  double c_tilde = 0.0;         // max over n-simplices of lipschitz / L
  double max_edge_lipschitz = 0.0;
  double corner_mu = 0.0;       // measured corner factor of the triangulation's shapes
  VertexReport vertex_report;
};

/// Throws UnsupportedFill if the target cannot fill some dimension <= n - 1.
SkeletonMap extend_skeleton(const SimplicialComplex& complex, const CompactSet& z, const BoundaryData& data,
                            const TargetSpace& target, int n, int jobs = 1);

/// Max over face pairs with a common vertex of (|x - v| + |v - y|) / |x - y|,
/// v the better of the closest points of the common face to x and y, over
/// `samples` random pairs per face pair.
double corner_factor(const std::vector<std::vector<double>>& simplex, int samples, std::uint64_t seed);

struct Projection {
  std::vector<double> bary;             // on the n-skeleton of the simplex
  std::vector<double> stage_factors;    // diam(sigma) / |x - c| per active stage
};

/// Radial projection of a point of an m-simplex (given in barycentric
/// coordinates) onto the simplex's n-skeleton. Throws SingularProximity when
/// some stage center is within eps_sing * diam(sigma).
Projection radial_project(const SimplicialComplex& complex, std::size_t top, std::span<const double> bary, int n,
                          double eps_sing);

enum class SampleKind { Regular, Collar, Singular };

struct FieldPolicy {
  double eps_sing = 1e-6;
  double collar = -1.0;  // negative: twice the diameter of the finest cubes
};

struct Evaluation {
  TargetPoint value;
  SampleKind kind = SampleKind::Regular;
  long simplex = -1;  // m-simplex for regular and singular points
};

struct SegmentSamples {
  std::vector<std::vector<double>> points;
  std::vector<TargetPoint> values;
  std::vector<SampleKind> kinds;
};

class ExtensionField {
 public:
  ExtensionField(std::shared_ptr<const SimplicialComplex> complex, std::shared_ptr<const CompactSet> z,
                 BoundaryData data, TargetSpace target, SkeletonMap skeleton, FieldPolicy policy);

  const SimplicialComplex& complex() const { return *complex_; }
  const CompactSet& sites() const { return *z_; }
  const BoundaryData& data() const { return data_; }
  const TargetSpace& target() const { return target_; }
  const SkeletonMap& skeleton() const { return skeleton_; }
  const Box& omega() const { return complex_->decomposition().omega; }
  int m() const { return complex_->dim(); }
  int n() const { return skeleton_.n; }
  double collar() const { return collar_; }
  double eps_sing() const { return policy_.eps_sing; }
  const TargetPoint& constant_value() const { return constant_value_; }
  /// L (C~ + 4): the slope assigned on the collar and the singular set.
  double collar_slope() const { return data_.lipschitz * (skeleton_.c_tilde + 4.0); }

  /// Throws std::invalid_argument if x is not in Omega.
  Evaluation evaluate_detailed(std::span<const double> x) const;
  TargetPoint evaluate(std::span<const double> x) const { return evaluate_detailed(x).value; }
  /// steps + 1 equispaced samples (a single one if a == b).
  SegmentSamples eval_on_segment(std::span<const double> a, std::span<const double> b, int steps) const;

 private:
  TargetPoint evaluate_cell(std::size_t top, std::span<const double> bary) const;

  std::shared_ptr<const SimplicialComplex> complex_;
  std::shared_ptr<const CompactSet> z_;
  BoundaryData data_;
  TargetSpace target_;
  SkeletonMap skeleton_;
  FieldPolicy policy_;
  double collar_ = 0.0;
  TargetPoint constant_value_;
};

/// Everything needed to rebuild the field: sites, values, decomposition
/// parameters, policies and the skeleton cell maps.
nlohmann::json field_to_json(const ExtensionField& field);
/// Rebuilds cubes and complex, checks them against the stored counts and
/// restores the stored cell maps. Evaluation is bit-identical to the original.
ExtensionField field_from_json(const nlohmann::json& j);

/// Builds decomposition, complex, skeleton map and field in one go.
ExtensionField build_field(const Box& omega, int max_generation, BoundaryData data, const TargetSpace& target, int n,
                           FieldPolicy policy = {}, int jobs = 1);

void to_json(nlohmann::json& j, const VertexReport& r);

}  // namespace heislift
