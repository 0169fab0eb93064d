#pragma once

// Heisenberg group H^n in exponential coordinates (x_1, y_1, ..., x_n, y_n, t).
//
// Group law:
//   p * q = (x + x', y + y', t + t' + 2 sum_j (x'_j y_j - x_j y'_j))
// Korányi gauge:
//   ||(x, y, t)||_K = (|(x, y)|^4 + t^2)^(1/4),   d_K(p, q) = ||q^-1 * p||_K
// A planar polyline lifts to a horizontal curve; along a straight segment
// from a to b the height changes by 2 sum_j (b_xj a_yj - a_xj b_yj).

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace heislift {

/// A point of H^n. `h` holds the 2n horizontal coordinates interleaved as
/// (x_1, y_1, ..., x_n, y_n); `t` is the vertical coordinate.
struct HPoint {
  std::vector<double> h;
  double t = 0.0;

  HPoint() = default;
  explicit HPoint(std::size_t n) : h(2 * n, 0.0) {}
  HPoint(std::vector<double> horizontal, double height);
  /// Builds from the flat layout [x_1, y_1, ..., x_n, y_n, t].
  static HPoint from_flat(std::span<const double> flat);

  std::size_t n() const { return h.size() / 2; }
  double x(std::size_t j) const { return h[2 * j]; }
  double y(std::size_t j) const { return h[2 * j + 1]; }
  std::vector<double> flat() const;

  static HPoint identity(std::size_t n) { return HPoint(n); }

  friend bool operator==(const HPoint&, const HPoint&) = default;
};

HPoint group_mul(const HPoint& p, const HPoint& q);
HPoint group_inv(const HPoint& p);

/// Anisotropic dilation (x, y, t) -> (lambda x, lambda y, lambda^2 t).
HPoint dilate(const HPoint& p, double lambda);

double koranyi_norm(const HPoint& p);
double koranyi_dist(const HPoint& p, const HPoint& q);
/// Same as koranyi_dist on the flat layout [x_1, y_1, ..., x_n, y_n, t].
double koranyi_dist_flat(std::span<const double> p, std::span<const double> q);

/// Height change forced on the straight planar segment a -> b by the
/// horizontality constraint. Exact: the integrand is constant on the segment.
double lift_increment(std::span<const double> a, std::span<const double> b);

/// Planar polyline with its exact horizontal lift. Heights are always derived
/// from the polyline and `t0`, never stored independently.
class HorizontalPath {
 public:
  HorizontalPath() = default;
  HorizontalPath(std::vector<std::vector<double>> vertices, double t0);

  std::size_t n() const { return vertices_.empty() ? 0 : vertices_.front().size() / 2; }
  std::size_t segment_count() const { return vertices_.empty() ? 0 : vertices_.size() - 1; }
  const std::vector<std::vector<double>>& vertices() const { return vertices_; }
  const std::vector<double>& lifted_t() const { return lifted_t_; }
  double t0() const { return t0_; }

  HPoint start() const { return point_at_vertex(0); }
  HPoint end() const { return point_at_vertex(vertices_.size() - 1); }
  HPoint point_at_vertex(std::size_t i) const;

  /// Horizontal length, i.e. the Euclidean length of the planar polyline.
  double length() const { return total_length_; }

  /// Point at planar arclength fraction s in [0, 1] (constant-speed
  /// parametrization). Exact lift inside the containing segment.
  HPoint at_fraction(double s) const;

  /// Left translation g * path; stays horizontal.
  HorizontalPath left_translated(const HPoint& g) const;

 private:
  std::vector<std::vector<double>> vertices_;
  double t0_ = 0.0;
  std::vector<double> lifted_t_;
  std::vector<double> cumulative_;  // planar arclength at each vertex
  double total_length_ = 0.0;
};

double path_length(const HorizontalPath& path);

/// Constant in l_H(connect_points(p, q)) <= gamma_h() * d_K(p, q).
/// The construction spends |(r_x, r_y)| + 2 sqrt|r_t| for r = p^-1 * q; the
/// maximum of a + 2 sqrt(b) subject to a^4 + b^2 = 1 is (1 + 2^(4/3))^(3/4).
double gamma_h();

/// Horizontal path from p to q: a straight planar segment followed by an
/// axis-aligned square loop in the (x_1, y_1) plane that corrects the height.
HorizontalPath connect_points(const HPoint& p, const HPoint& q);

void to_json(nlohmann::json& j, const HPoint& p);
void from_json(const nlohmann::json& j, HPoint& p);
void to_json(nlohmann::json& j, const HorizontalPath& path);
/// Recomputes the lift and rejects files whose stored heights disagree.
void from_json(const nlohmann::json& j, HorizontalPath& path);

}  // namespace heislift
