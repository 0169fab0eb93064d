#pragma once

// Finite point cloud Z with exact nearest-site queries, and the dyadic
// Whitney decomposition of the complement of Z restricted to a box omega.
//
// A cube Q is accepted when diam(Q) <= d(Q, Z) while its parent P failed,
// d(P, Z) < diam(P). Since Q lies inside P,
//   d(Q, Z) <= d(P, Z) + diam(P) < 2 diam(P) = 4 diam(Q),
// so every accepted cube satisfies 1 <= d(Q, Z) / diam(Q) < 4. The same
// strict inequality forbids touching cubes whose generations differ by 2.

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace heislift {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> x) const;
  bool contains_strictly(std::span<const double> x) const;
  double volume() const;
  double diameter() const;
};

/// Finite sample of the compact set Z with a kd-tree for nearest queries.
class CompactSet {
 public:
  struct Nearest {
    std::size_t index = 0;
    double distance = 0.0;
  };

  explicit CompactSet(const std::vector<std::vector<double>>& points);

  int dim() const { return m_; }
  std::size_t size() const { return count_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * m_, static_cast<std::size_t>(m_)}; }

  /// Nearest site; equidistant sites resolve to the lowest index.
  Nearest nearest(std::span<const double> x) const;
  double distance(std::span<const double> x) const { return nearest(x).distance; }
  /// min over sites of the distance to the closed box [lo, hi].
  double box_distance(std::span<const double> lo, std::span<const double> hi) const;

 private:
  struct Node {
    std::vector<double> lo, hi;  // bounding box of the node's points
    std::uint32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, std::span<const double> x, double& best_d2, std::size_t& best) const;
  void search_box(std::int32_t node, std::span<const double> lo, std::span<const double> hi, double& best_d2) const;

  int m_ = 0;
  std::size_t count_ = 0;
  std::vector<double> coords_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Axis-aligned dyadic cube frame: generation g cubes have side root_side / 2^g
/// and corners origin + lattice * side.
struct DyadicFrame {
  std::vector<double> origin;
  double root_side = 1.0;

  int dim() const { return static_cast<int>(origin.size()); }
  double side(int generation) const;
  double diameter(int generation) const;
};

struct WhitneyCube {
  int generation = 0;
  std::vector<std::int64_t> lattice;

  Box box(const DyadicFrame& frame) const;
  friend bool operator==(const WhitneyCube&, const WhitneyCube&) = default;
  friend auto operator<=>(const WhitneyCube&, const WhitneyCube&) = default;
};

struct CubeKeyHash {
  std::size_t operator()(const WhitneyCube& c) const noexcept;
};

struct Decomposition {
  DyadicFrame frame;
  Box omega;
  int max_generation = 0;
  std::vector<WhitneyCube> cubes;       // accepted, sorted by (generation, lattice)
  std::vector<double> cube_distance;    // d(Q, Z) for each accepted cube
  std::vector<WhitneyCube> unresolved;  // still failing at max_generation, sorted

  /// Accepted cube lookup by (generation, lattice); -1 if absent.
  long find(const WhitneyCube& key) const;
  /// Indices of accepted cubes whose closed box contains x.
  std::vector<std::size_t> cubes_containing(std::span<const double> x) const;
  /// Smallest generation present, largest generation present.
  int min_present_generation() const { return min_gen_; }
  int max_present_generation() const { return max_gen_; }

  void build_index();

 private:
  std::unordered_map<WhitneyCube, std::size_t, CubeKeyHash> index_;
  int min_gen_ = 0;
  int max_gen_ = 0;
};

/// Root cube: centered on omega, side = 4/3 of omega's longest extent, which
/// leaves a margin of 1/8 of the side on that axis.
DyadicFrame root_frame(const Box& omega);

/// Throws std::invalid_argument if a site is not strictly inside omega.
Decomposition decompose(const CompactSet& z, const Box& omega, int max_generation);

struct NeighborStats {
  int max_neighbors = 0;
  int max_generation_jump = 0;
};

/// Touching-cube statistics over accepted cubes. Generations up to two apart
/// are scanned, so a jump of 2 is detected rather than assumed away.
NeighborStats neighbor_stats(const Decomposition& dec);

struct WhitneyReport {
  std::size_t cube_count = 0;
  std::size_t unresolved_count = 0;
  double min_ratio = 0.0;  // min over cubes of d(Q, Z) / diam(Q), must be >= 1
  double max_ratio = 0.0;  // must be <= 4
  int max_neighbors = 0;   // must be <= 12^m
  int max_generation_jump = 0;  // between touching cubes, must be <= 1
  int neighbor_limit = 0;

  bool ok() const;
};

WhitneyReport verify_whitney(const Decomposition& dec, const CompactSet& z);

void to_json(nlohmann::json& j, const Box& b);
void from_json(const nlohmann::json& j, Box& b);
void to_json(nlohmann::json& j, const WhitneyReport& r);
nlohmann::json cubes_to_json(const Decomposition& dec);

}  // namespace heislift
