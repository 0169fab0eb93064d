#pragma once

// Target spaces Y with a distance and constructive Lipschitz fills:
// an L-Lipschitz map on the boundary of a (k+1)-cell extends to a
// gamma*L-Lipschitz map on the cell.
//
//   Euclidean(d)   fills for every k (barycentric cone, gamma = 1)
//   Heisenberg(n)  fills for k = 0 only (connect_points, gamma = gamma_h())

#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "heislift/heis_core.hpp"

namespace heislift {

/// Point of a target space in its flat coordinate model: R^d for Euclidean
/// targets, [x_1, y_1, ..., x_n, y_n, t] for H^n.
using TargetPoint = std::vector<double>;

enum class TargetKind { Euclidean, Heisenberg };

class TargetSpace {
 public:
  static TargetSpace euclidean(int d);
  static TargetSpace heisenberg(int n);

  TargetKind kind() const { return kind_; }
  /// d for Euclidean(d), n for Heisenberg(n).
  int dimension() const { return dim_; }
  /// Number of flat coordinates of a point.
  int ambient_dim() const { return kind_ == TargetKind::Euclidean ? dim_ : 2 * dim_ + 1; }
  double gamma() const { return gamma_; }
  std::string name() const;

  bool supports_fill(int k) const { return kind_ == TargetKind::Euclidean ? k >= 0 : k == 0; }

  double dist(std::span<const double> a, std::span<const double> b) const;
  void check_point(std::span<const double> a) const;

  /// Heisenberg dilation delta_lambda or Euclidean scaling.
  TargetPoint dilate(std::span<const double> a, double lambda) const;

  friend bool operator==(const TargetSpace&, const TargetSpace&) = default;

 private:
  TargetSpace(TargetKind kind, int dim, double gamma) : kind_(kind), dim_(dim), gamma_(gamma) {}
  TargetKind kind_ = TargetKind::Euclidean;
  int dim_ = 1;
  double gamma_ = 1.0;
};

/// Affine interpolation of vertex values over a cell.
struct LinearCell {
  std::vector<TargetPoint> vertex_values;
};

/// Edge map into H^n: a horizontal path traversed at constant planar speed.
struct PathCell {
  HorizontalPath path;
  TargetPoint start;
  TargetPoint end;
};

/// A map from a k-cell (given by barycentric coordinates) into the target.
class CellMap {
 public:
  CellMap() = default;
  CellMap(int dimension, LinearCell cell, double lipschitz);
  CellMap(PathCell cell, double lipschitz);

  int dimension() const { return dim_; }
  /// Upper bound for the Lipschitz constant w.r.t. the cell's Euclidean metric.
  double lipschitz() const { return lipschitz_; }
  bool is_path() const { return std::holds_alternative<PathCell>(rep_); }
  const PathCell& path_cell() const { return std::get<PathCell>(rep_); }
  const LinearCell& linear_cell() const { return std::get<LinearCell>(rep_); }

  /// Vertex values are returned exactly at barycentric unit vectors.
  TargetPoint evaluate(std::span<const double> bary) const;
  TargetPoint vertex_value(int i) const;

 private:
  int dim_ = 0;
  std::variant<LinearCell, PathCell> rep_;
  double lipschitz_ = 0.0;
};

/// Boundary data of a (k+1)-cell: its vertices in R^m, the values already
/// assigned there, and the Lipschitz constant of the boundary map. Every
/// fill this library ships is determined by the vertex values: Euclidean
/// boundary maps are themselves affine on each facet.
struct CellBoundary {
  std::vector<std::vector<double>> vertices;
  std::vector<TargetPoint> values;
  double lipschitz = 0.0;
};

/// Extends the boundary map of a (k+1)-cell to the whole cell.
/// Throws UnsupportedFill for (kind, k) pairs the target cannot fill.
CellMap fill_sphere(const TargetSpace& target, int k, const CellBoundary& boundary);

/// Lipschitz constant of the affine interpolation of `values` on the simplex
/// spanned by `vertices` (largest singular value of the linear part).
double affine_lipschitz(const std::vector<std::vector<double>>& vertices, const std::vector<TargetPoint>& values);

void to_json(nlohmann::json& j, const TargetSpace& y);
TargetSpace target_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const CellMap& c);
CellMap cell_from_json(const nlohmann::json& j);

}  // namespace heislift
