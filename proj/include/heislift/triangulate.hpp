#pragma once

// Simplicial subdivision of a Whitney cube family.
//
// Every cube face is triangulated once, as a geometric object keyed by exact
// integer coordinates, and shared by all cubes that contain it. A k-face is
// either coned over its center from the triangulation of its boundary, or,
// when a cube one generation finer touches it along a k-face, split into its
// 2^k dyadic children first (and then all of its boundary faces are split
// too). Touching cubes differ by at most one generation, so children are
// never split again and the result is conforming.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "heislift/whitney.hpp"

namespace heislift {

class SimplicialComplex {
 public:
  struct Location {
    std::size_t simplex = 0;
    std::vector<double> bary;  // m+1 entries, sums to 1
  };

  int dim() const { return m_; }
  std::size_t vertex_count() const { return vertex_coords_.size() / m_; }
  std::span<const double> vertex(std::size_t v) const {
    return {vertex_coords_.data() + v * m_, static_cast<std::size_t>(m_)};
  }

  std::size_t simplex_count(int k) const { return simplices_[k].size() / (k + 1); }
  std::span<const int> simplex(int k, std::size_t id) const {
    return {simplices_[k].data() + id * (k + 1), static_cast<std::size_t>(k + 1)};
  }
  /// Id of the k-simplex with these (sorted) vertices, -1 if not stored.
  long find_simplex(std::span<const int> sorted_vertices) const;

  /// For an m-simplex and a nonzero mask over its m+1 local vertices, the id
  /// of that face in dimension popcount(mask) - 1.
  int face_id(std::size_t top, unsigned mask) const { return face_table_[top * (std::size_t{1} << (m_ + 1)) + mask]; }
  std::size_t parent_cube(std::size_t top) const { return parent_cube_[top]; }
  std::pair<std::size_t, std::size_t> cube_simplices(std::size_t cube) const {
    return {cube_begin_[cube], cube_begin_[cube + 1]};
  }
  double top_diameter(std::size_t top) const { return top_diam_[top]; }
  double top_volume(std::size_t top) const;

  const Decomposition& decomposition() const { return dec_; }

  /// Barycentric coordinates of x with respect to an m-simplex.
  void barycentric(std::size_t top, std::span<const double> x, std::span<double> out) const;

  /// m-simplex containing x (lowest id on shared faces); nullopt if x lies
  /// outside every accepted cube.
  std::optional<Location> try_locate(std::span<const double> x) const;
  /// Throws NotCovered when try_locate fails.
  Location locate(std::span<const double> x) const;

  friend SimplicialComplex build_complex(const Decomposition& dec);
  friend SimplicialComplex complex_from_json(const nlohmann::json& j, const Decomposition& dec);

 private:
  void finalize();

  int m_ = 0;
  Decomposition dec_;
  std::vector<double> vertex_coords_;
  std::vector<std::vector<int>> simplices_;  // per dimension, flat, stride k+1
  std::vector<std::map<std::vector<int>, int>> lookup_;
  std::vector<int> face_table_;
  std::vector<std::size_t> parent_cube_;
  std::vector<std::size_t> cube_begin_;
  std::vector<double> top_diam_;
  std::vector<double> bary_inverse_;  // per m-simplex: m*m inverse of [v_i - v_0]
};

/// Throws std::invalid_argument when touching cubes differ by more than one
/// generation and ConstructionError if the conformity checks fail.
SimplicialComplex build_complex(const Decomposition& dec);

struct ComplexValidation {
  std::size_t facet_overuse = 0;      // facets with more than two cofaces
  std::size_t same_side_pairs = 0;    // two cofaces on the same side of a facet
  std::size_t hanging_vertices = 0;   // vertex inside a simplex it does not span
  std::size_t degenerate = 0;         // zero-volume m-simplices
  std::size_t duplicate_vertices = 0;
  double max_volume_error = 0.0;      // relative, per cube
  long first_bad = -1;
  long second_bad = -1;

  std::size_t violations() const {
    return facet_overuse + same_side_pairs + hanging_vertices + degenerate + duplicate_vertices +
           (max_volume_error > 1e-9 ? 1 : 0);
  }
};

ComplexValidation validate_complex(const SimplicialComplex& complex);

/// Per m-simplex shape data.
struct SimplexShape {
  double diam = 0.0;
  double beta = 0.0;   // min barycenter-to-facet-plane distance over faces of dim >= 1
  double big_b = 0.0;  // max of the same
};

SimplexShape simplex_shape(const std::vector<std::vector<double>>& vertices);

/// Sorted edge lengths scaled by the longest.
std::vector<double> edge_profile(const std::vector<std::vector<double>>& vertices);

/// Simplices up to similarity. A profile joins the first known class whose
/// representative agrees within 1e-9 in every entry; ids follow first
/// appearance.
class SimilarityClasses {
 public:
  std::size_t classify(const std::vector<double>& profile);
  std::size_t size() const { return reps_.size(); }
  const std::vector<double>& representative(std::size_t id) const { return reps_[id]; }

 private:
  std::vector<std::vector<double>> reps_;
};

struct QualityReport {
  std::size_t simplex_count = 0;
  std::size_t degenerate = 0;
  double min_diam_over_beta = 0.0;
  double max_diam_over_beta = 0.0;  // measured D_2 (flatness)
  double min_diam_over_bigb = 0.0;  // measured D_1
  double max_diam_over_bigb = 0.0;
  // Bracket d(Q, Z) <= d(sigma, Z) <= min over vertices of d(v, Z).
  double min_size_lower = 0.0;  // min over sigma of d(Q, Z) / diam(sigma), must be >= 1
  double max_size_upper = 0.0;  // max over sigma of min_v d(v, Z) / diam(sigma)
  double size_limit = 0.0;      // 12 sqrt(m)
  SimilarityClasses classes;
  std::vector<std::size_t> class_members;  // simplices per class

  std::size_t class_count() const { return classes.size(); }
  bool size_ok() const { return min_size_lower >= 1.0 - 1e-12 && max_size_upper <= size_limit; }
};

QualityReport quality_report(const SimplicialComplex& complex, const CompactSet& z);

std::vector<std::vector<double>> simplex_vertices(const SimplicialComplex& complex, int k, std::size_t id);

nlohmann::json complex_to_json(const SimplicialComplex& complex);
/// Rebuilds the complex from the cube decomposition and checks that the
/// stored vertex and simplex tables match.
SimplicialComplex complex_from_json(const nlohmann::json& j, const Decomposition& dec);
std::string complex_to_off(const SimplicialComplex& complex);
void to_json(nlohmann::json& j, const QualityReport& q);
void to_json(nlohmann::json& j, const ComplexValidation& v);

}  // namespace heislift
