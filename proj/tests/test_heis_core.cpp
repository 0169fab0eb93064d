#include <doctest.h>

#include <cmath>
#include <random>

#include "heislift/heis_core.hpp"

using namespace heislift;

namespace {

HPoint random_point(std::mt19937_64& rng, std::size_t n, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  HPoint p(n);
  for (double& c : p.h) c = u(rng);
  p.t = u(rng) * scale;
  return p;
}

bool close(const HPoint& a, const HPoint& b, double tol) {
  for (std::size_t i = 0; i < a.h.size(); ++i) {
    if (std::abs(a.h[i] - b.h[i]) > tol) return false;
  }
  return std::abs(a.t - b.t) <= tol;
}

// Height change of a straight segment by composite midpoint quadrature of
// dt = 2 sum (y dx - x dy).
double quadrature_lift(const std::vector<double>& a, const std::vector<double>& b, int steps) {
  double total = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double u = (s + 0.5) / steps;
    for (std::size_t j = 0; j + 1 < a.size(); j += 2) {
      const double x = a[j] + u * (b[j] - a[j]);
      const double y = a[j + 1] + u * (b[j + 1] - a[j + 1]);
      total += 2.0 * (y * (b[j] - a[j]) - x * (b[j + 1] - a[j + 1])) / steps;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("group law examples") {
  const HPoint p({1, 2}, 3);
  CHECK(group_mul(p, HPoint::identity(1)) == p);
  const HPoint r = group_mul(HPoint({1, 0}, 0), HPoint({0, 1}, 0));
  CHECK(r == HPoint({1, 1}, -2));
  CHECK(group_inv(HPoint({1, 1}, -2)) == HPoint({-1, -1}, 2));
  CHECK(group_inv(HPoint::identity(1)) == HPoint::identity(1));
  CHECK_THROWS_AS(group_mul(HPoint(1), HPoint(2)), std::invalid_argument);
}

TEST_CASE("group axioms on random tuples") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1, 2}) {
    for (int i = 0; i < 2000; ++i) {
      const HPoint p = random_point(rng, n), q = random_point(rng, n), s = random_point(rng, n);
      CHECK(close(group_mul(p, group_inv(p)), HPoint::identity(n), 1e-12));
      CHECK(group_inv(group_inv(p)) == p);
      CHECK(close(group_mul(group_mul(p, q), s), group_mul(p, group_mul(q, s)), 1e-12));
    }
  }
}

TEST_CASE("koranyi distance examples") {
  CHECK(koranyi_dist(HPoint({3, 4}, 0), HPoint::identity(1)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(koranyi_dist(HPoint({0, 0}, 9), HPoint::identity(1)) == doctest::Approx(3.0).epsilon(1e-15));
  const HPoint p({0.3, -1.2}, 0.7);
  CHECK(koranyi_dist(p, p) == 0.0);
}

TEST_CASE("koranyi distance equals the norm of q^-1 p") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 2000; ++i) {
    const HPoint p = random_point(rng, 1), q = random_point(rng, 1);
    const double direct = koranyi_norm(group_mul(group_inv(q), p));
    CHECK(koranyi_dist(p, q) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(koranyi_dist_flat(p.flat(), q.flat()) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("left invariance and dilation homogeneity") {
  std::mt19937_64 rng(13);
  for (std::size_t n : {1, 2}) {
    for (int i = 0; i < 5000; ++i) {
      const HPoint g = random_point(rng, n), p = random_point(rng, n), q = random_point(rng, n);
      const double d = koranyi_dist(p, q);
      CHECK(koranyi_dist(group_mul(g, p), group_mul(g, q)) == doctest::Approx(d).epsilon(1e-10));
      CHECK(koranyi_dist(q, p) == doctest::Approx(d).epsilon(1e-12));
      const double lambda = std::exp(std::uniform_real_distribution<double>(-3, 3)(rng));
      CHECK(koranyi_dist(dilate(p, lambda), dilate(q, lambda)) == doctest::Approx(lambda * d).epsilon(1e-10));
    }
  }
}

TEST_CASE("triangle inequality holds on random triples") {
  std::mt19937_64 rng(14);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const HPoint a = random_point(rng, 1), b = random_point(rng, 1), c = random_point(rng, 1);
    if (koranyi_dist(a, c) > koranyi_dist(a, b) + koranyi_dist(b, c) + 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("lift increment examples") {
  const std::vector<double> o{0, 0}, e1{1, 0}, e12{1, 1}, e2{0, 1};
  CHECK(lift_increment(o, e1) == 0.0);
  CHECK(lift_increment(e1, e12) == -2.0);
  CHECK(lift_increment(o, e1) + lift_increment(e1, e12) + lift_increment(e12, e2) + lift_increment(e2, o) == -4.0);
}

TEST_CASE("lift increment is -4 times signed area on closed polygons") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::vector<double>> poly(5, std::vector<double>(2));
    for (auto& v : poly) v = {u(rng), u(rng)};
    double lift = 0.0, shoelace = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const auto& a = poly[k];
      const auto& b = poly[(k + 1) % poly.size()];
      lift += lift_increment(a, b);
      shoelace += 0.5 * (a[0] * b[1] - b[0] * a[1]);
    }
    CHECK(lift == doctest::Approx(-4.0 * shoelace).epsilon(1e-12));
  }
}

TEST_CASE("lifted heights agree with quadrature") {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> a{u(rng), u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng), u(rng)};
    CHECK(std::abs(lift_increment(a, b) - quadrature_lift(a, b, 100)) <= 1e-9);
  }
}

TEST_CASE("path length examples") {
  CHECK(path_length(HorizontalPath({{0, 0}, {3, 4}}, 0)) == 5.0);
  CHECK(path_length(HorizontalPath({{1, 1}}, 2)) == 0.0);
  CHECK(path_length(HorizontalPath({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}, 0)) == 4.0);
  const HorizontalPath square({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}, 0.5);
  CHECK(square.end().t == 0.5 - 4.0);
  CHECK(square.lifted_t().front() == 0.5);
}

TEST_CASE("at_fraction moves at constant planar speed along the exact lift") {
  const HorizontalPath path({{0, 0}, {2, 0}, {2, 2}}, 1.0);
  const HPoint mid = path.at_fraction(0.75);
  CHECK(mid.h == std::vector<double>{2, 1});
  CHECK(mid.t == doctest::Approx(1.0 + lift_increment(std::vector<double>{2, 0}, std::vector<double>{2, 1})));
  CHECK(path.at_fraction(0.0) == path.start());
  CHECK(path.at_fraction(1.0) == path.end());
}

TEST_CASE("connect_points examples") {
  const HPoint o = HPoint::identity(1);
  const HorizontalPath a = connect_points(o, HPoint({1, 0}, 0));
  CHECK(a.length() == doctest::Approx(1.0));
  CHECK(close(a.end(), HPoint({1, 0}, 0), 1e-12));
  const HorizontalPath b = connect_points(o, HPoint({0, 0}, -4));
  CHECK(b.length() == doctest::Approx(4.0));
  CHECK(close(b.end(), HPoint({0, 0}, -4), 1e-12));
  const HPoint p({0.4, -0.1}, 2.5);
  CHECK(connect_points(p, p).length() == 0.0);
}

TEST_CASE("connect_points reaches the target within gamma_h * d_K") {
  // Closed form of max a + 2 sqrt(b) over a^4 + b^2 = 1, checked by a scan.
  double scan = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double a = i / 200000.0;
    scan = std::max(scan, a + 2.0 * std::sqrt(std::sqrt(1.0 - a * a * a * a)));
  }
  CHECK(gamma_h() == doctest::Approx(scan).epsilon(1e-9));

  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (std::size_t n : {1, 2}) {
    for (int i = 0; i < 10000; ++i) {
      const HPoint p = random_point(rng, n, 3.0), q = random_point(rng, n, 3.0);
      const HorizontalPath path = connect_points(p, q);
      CHECK(close(path.start(), p, 1e-9));
      CHECK(close(path.end(), q, 1e-9));
      worst = std::max(worst, path.length() / koranyi_dist(p, q));
    }
  }
  CHECK(worst <= gamma_h() * (1.0 + 1e-9));
  MESSAGE("max l_H / d_K over 2e4 pairs: " << worst << ", gamma_h = " << gamma_h());
}

TEST_CASE("vertical part of d_K is bounded by the distance") {
  std::mt19937_64 rng(18);
  for (int i = 0; i < 5000; ++i) {
    const HPoint p = random_point(rng, 1), q = random_point(rng, 1);
    const HPoint r = group_mul(group_inv(q), p);
    CHECK(std::sqrt(std::abs(r.t)) <= koranyi_dist(p, q) * (1.0 + 1e-12));
  }
}

TEST_CASE("json round trip") {
  const HorizontalPath path = connect_points(HPoint({0.2, 0.1}, -0.3), HPoint({1.0, -0.5}, 0.9));
  const nlohmann::json j = path;
  const auto back = j.get<HorizontalPath>();
  CHECK(back.vertices() == path.vertices());
  CHECK(back.lifted_t() == path.lifted_t());
  nlohmann::json bad = j;
  bad["lifted_t"][1] = bad["lifted_t"][1].get<double>() + 1.0;
  CHECK_THROWS(bad.get<HorizontalPath>());
  const HPoint p({1.5, -2.0}, 0.25);
  CHECK(nlohmann::json(p).get<HPoint>() == p);
}
