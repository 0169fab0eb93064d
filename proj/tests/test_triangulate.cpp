#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "heislift/errors.hpp"
#include "heislift/triangulate.hpp"

using namespace heislift;

namespace {

Decomposition manual(int m, double root_side, std::vector<WhitneyCube> cubes) {
  Decomposition dec;
  dec.frame.origin.assign(m, 0.0);
  dec.frame.root_side = root_side;
  dec.omega = Box{std::vector<double>(m, 0.0), std::vector<double>(m, 4.0 * root_side)};
  std::sort(cubes.begin(), cubes.end());
  dec.cubes = std::move(cubes);
  dec.cube_distance.assign(dec.cubes.size(), 1.0);
  for (const auto& q : dec.cubes) dec.max_generation = std::max(dec.max_generation, q.generation);
  dec.build_index();
  return dec;
}

Decomposition random_instance(std::uint64_t seed, int m, int sites, int max_gen) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<std::vector<double>> pts(sites, std::vector<double>(m));
  for (auto& p : pts) {
    for (double& c : p) c = u(rng);
  }
  return decompose(CompactSet(pts), Box{std::vector<double>(m, -1.0), std::vector<double>(m, 1.0)}, max_gen);
}

}  // namespace

TEST_CASE("a single square gives 8 congruent triangles") {
  const SimplicialComplex c = build_complex(manual(2, 2.0, {{0, {0, 0}}}));
  CHECK(c.vertex_count() == 9);
  CHECK(c.simplex_count(1) == 16);
  CHECK(c.simplex_count(2) == 8);
  CHECK(validate_complex(c).violations() == 0);
  const QualityReport q = quality_report(c, CompactSet({{-1.0, -1.0}}));
  CHECK(q.class_count() == 1);
  // Triangle (center, edge midpoint, corner) with half side 1: diam sqrt 2.
  // Smallest distance: barycenter to the hypotenuse, 1 / (3 sqrt 2).
  // Largest: midpoint of the hypotenuse to its endpoints, sqrt 2 / 2.
  CHECK(q.max_diam_over_beta == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(q.min_diam_over_beta == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(q.max_diam_over_bigb == doctest::Approx(2.0).epsilon(1e-12));
  double area = 0.0;
  for (std::size_t t = 0; t < c.simplex_count(2); ++t) area += c.top_volume(t);
  CHECK(area == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("a single cube gives 48 congruent tetrahedra") {
  const SimplicialComplex c = build_complex(manual(3, 2.0, {{0, {0, 0, 0}}}));
  // 8 corners, 12 edge midpoints, 6 face centers, 1 center.
  CHECK(c.vertex_count() == 27);
  CHECK(c.simplex_count(3) == 48);
  // 48 boundary triangles plus one interior triangle per boundary edge
  // (24 half edges and 48 spokes).
  CHECK(c.simplex_count(2) == 48 + 72);
  CHECK(validate_complex(c).violations() == 0);
  CHECK(quality_report(c, CompactSet({{-1.0, -1.0, -1.0}})).class_count() == 1);
}

TEST_CASE("two equal adjacent squares share their half edges") {
  const SimplicialComplex c = build_complex(manual(2, 4.0, {{1, {0, 0}}, {1, {1, 0}}}));
  CHECK(c.vertex_count() == 15);
  CHECK(c.simplex_count(1) == 30);
  CHECK(c.simplex_count(2) == 16);
  CHECK(c.vertex_count() - c.simplex_count(1) + c.simplex_count(2) == 1);
  CHECK(validate_complex(c).violations() == 0);
}

TEST_CASE("a coarse square next to two finer squares is conforming") {
  // Coarse [0,2]^2 in units of the fine side; fine squares along its right edge.
  const SimplicialComplex c = build_complex(manual(2, 8.0, {{2, {0, 0}}, {3, {2, 0}}, {3, {2, 1}}}));
  const ComplexValidation v = validate_complex(c);
  CHECK(v.violations() == 0);
  CHECK(v.hanging_vertices == 0);
  // The coarse right edge is split into two children, each split again.
  const std::vector<double> mid{2.0, 1.0};
  bool found = false;
  for (std::size_t i = 0; i < c.vertex_count(); ++i) {
    found = found || (c.vertex(i)[0] == mid[0] && c.vertex(i)[1] == mid[1]);
  }
  CHECK(found);
}

TEST_CASE("touching cubes two generations apart are rejected") {
  CHECK_THROWS_AS(build_complex(manual(2, 4.0, {{0, {0, 0}}, {2, {4, 0}}})), std::invalid_argument);
}

TEST_CASE("random complexes are valid and partition the cubes") {
  for (int m : {2, 3}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Decomposition dec = random_instance(seed, m, m == 2 ? 40 : 12, m == 2 ? 7 : 4);
      const SimplicialComplex c = build_complex(dec);
      const ComplexValidation v = validate_complex(c);
      CHECK(v.violations() == 0);
      CHECK(v.max_volume_error < 1e-12);
      double cubes = 0.0, simplices = 0.0;
      for (const auto& q : dec.cubes) cubes += q.box(dec.frame).volume();
      for (std::size_t t = 0; t < c.simplex_count(m); ++t) simplices += c.top_volume(t);
      CHECK(simplices == doctest::Approx(cubes).epsilon(1e-10));
      for (std::size_t t = 0; t < c.simplex_count(m); ++t) {
        const auto s = c.simplex(m, t);
        CHECK(std::is_sorted(s.begin(), s.end()));
      }
    }
  }
}

TEST_CASE("similarity classes reach a fixed ceiling under refinement") {
  std::set<std::size_t> counts2, counts3;
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    for (int g : {6, 8}) {
      const Decomposition dec = random_instance(seed, 2, 30, g);
      const QualityReport q = quality_report(build_complex(dec), CompactSet({{0.0, 0.0}}));
      counts2.insert(q.class_count());
      CHECK(q.degenerate == 0);
      CHECK(q.min_diam_over_beta > 0.0);
      CHECK(std::isfinite(q.max_diam_over_beta));
      CHECK(q.max_diam_over_beta == doctest::Approx(12.0).epsilon(1e-9));
    }
    const Decomposition dec3 = random_instance(seed, 3, 10, 4);
    counts3.insert(quality_report(build_complex(dec3), CompactSet({{0.0, 0.0, 0.0}})).class_count());
  }
  CHECK(*counts2.rbegin() == 3);
  CHECK(*counts3.rbegin() <= 7);
}

TEST_CASE("simplex sizes sit between d(Q,Z) and 12 sqrt(m) diam") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::vector<std::vector<double>> pts(30, std::vector<double>(2));
  for (auto& p : pts) p = {u(rng), u(rng)};
  const CompactSet z(pts);
  const Decomposition dec = decompose(z, Box{{-1, -1}, {1, 1}}, 8);
  const QualityReport q = quality_report(build_complex(dec), z);
  CHECK(q.size_ok());
  CHECK(q.size_limit == doctest::Approx(12.0 * std::sqrt(2.0)));
  CHECK(q.min_size_lower >= 1.0);
}

TEST_CASE("locate round trip") {
  const Decomposition dec = random_instance(4, 2, 20, 7);
  const SimplicialComplex c = build_complex(dec);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> pick(0, dec.cubes.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const Box b = dec.cubes[pick(rng)].box(dec.frame);
    std::vector<double> x{b.lo[0] + u(rng) * (b.hi[0] - b.lo[0]), b.lo[1] + u(rng) * (b.hi[1] - b.lo[1])};
    const auto loc = c.locate(x);
    double sum = 0.0;
    std::vector<double> back(2, 0.0);
    const auto s = c.simplex(2, loc.simplex);
    for (int k = 0; k < 3; ++k) {
      CHECK(loc.bary[k] >= -1e-12);
      sum += loc.bary[k];
      for (int a = 0; a < 2; ++a) back[a] += loc.bary[k] * c.vertex(s[k])[a];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(back[0] - x[0]) < 1e-12);
    CHECK(std::abs(back[1] - x[1]) < 1e-12);
  }
  // Vertices lie on shared faces: the lowest incident id wins.
  for (std::size_t v = 0; v < c.vertex_count(); v += 7) {
    const auto loc = c.locate(c.vertex(v));
    std::size_t lowest = c.simplex_count(2);
    for (std::size_t t = 0; t < c.simplex_count(2); ++t) {
      const auto s = c.simplex(2, t);
      if (std::find(s.begin(), s.end(), static_cast<int>(v)) != s.end()) {
        lowest = t;
        break;
      }
    }
    CHECK(loc.simplex == lowest);
  }
  CHECK_THROWS_AS(c.locate(std::vector<double>{5.0, 5.0}), NotCovered);
}

TEST_CASE("faces are shared objects") {
  const SimplicialComplex c = build_complex(random_instance(7, 2, 15, 6));
  for (std::size_t t = 0; t < c.simplex_count(2); ++t) {
    const auto s = c.simplex(2, t);
    for (unsigned mask = 1; mask < 8; ++mask) {
      std::vector<int> face;
      for (int k = 0; k < 3; ++k) {
        if (mask >> k & 1) face.push_back(s[k]);
      }
      CHECK(c.find_simplex(face) == c.face_id(t, mask));
    }
    CHECK(c.face_id(t, 7) == static_cast<int>(t));
  }
}

TEST_CASE("JSON round trip rebuilds the same tables") {
  const Decomposition dec = random_instance(8, 2, 10, 6);
  const SimplicialComplex c = build_complex(dec);
  const SimplicialComplex back = complex_from_json(complex_to_json(c), dec);
  CHECK(back.vertex_count() == c.vertex_count());
  CHECK(back.simplex_count(2) == c.simplex_count(2));
  auto j = complex_to_json(c);
  CHECK(complex_to_off(c).rfind("OFF", 0) == 0);
}

TEST_CASE("similarity classes tolerate rounding in the edge profile") {
  SimilarityClasses classes;
  // 1/sqrt(5) * 1e9 sits next to a half-integer, so fixed-grid keys split it.
  const double a = 1.0 / std::sqrt(5.0);
  CHECK(classes.classify({a, 2.0 * a, 1.0}) == 0);
  CHECK(classes.classify({a + 1e-12, 2.0 * a, 1.0}) == 0);
  CHECK(classes.classify({a + 1e-6, 2.0 * a, 1.0}) == 1);
  CHECK(classes.classify({0.5, 1.0}) == 2);
  CHECK(classes.size() == 3);
  const auto p = edge_profile({{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}});
  REQUIRE(p.size() == 3);
  CHECK(p[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(p[2] == 1.0);
}
