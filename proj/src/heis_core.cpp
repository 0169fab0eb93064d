#include "heislift/heis_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace heislift {

namespace {

void require_same_n(const HPoint& p, const HPoint& q) {
  if (p.h.size() != q.h.size()) {
    throw std::invalid_argument("Heisenberg points of different dimension: " +
                                std::to_string(p.n()) + " vs " + std::to_string(q.n()));
  }
}

double planar_norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace

HPoint::HPoint(std::vector<double> horizontal, double height) : h(std::move(horizontal)), t(height) {
  if (h.size() % 2 != 0) throw std::invalid_argument("horizontal part must have even length");
}

HPoint HPoint::from_flat(std::span<const double> flat) {
  if (flat.size() < 3 || flat.size() % 2 == 0) {
    throw std::invalid_argument("Heisenberg point needs 2n+1 coordinates, got " +
                                std::to_string(flat.size()));
  }
  return HPoint(std::vector<double>(flat.begin(), flat.end() - 1), flat.back());
}

std::vector<double> HPoint::flat() const {
  std::vector<double> out(h);
  out.push_back(t);
  return out;
}

HPoint group_mul(const HPoint& p, const HPoint& q) {
  require_same_n(p, q);
  HPoint r(p.n());
  double twist = 0.0;
  for (std::size_t j = 0; j < p.n(); ++j) {
    r.h[2 * j] = p.x(j) + q.x(j);
    r.h[2 * j + 1] = p.y(j) + q.y(j);
    twist += q.x(j) * p.y(j) - p.x(j) * q.y(j);
  }
  r.t = p.t + q.t + 2.0 * twist;
  return r;
}

HPoint group_inv(const HPoint& p) {
  HPoint r(p.n());
  for (std::size_t i = 0; i < p.h.size(); ++i) r.h[i] = -p.h[i];
  r.t = -p.t;
  return r;
}

HPoint dilate(const HPoint& p, double lambda) {
  HPoint r(p.n());
  for (std::size_t i = 0; i < p.h.size(); ++i) r.h[i] = lambda * p.h[i];
  r.t = lambda * lambda * p.t;
  return r;
}

double koranyi_norm(const HPoint& p) {
  double r2 = 0.0;
  for (double c : p.h) r2 += c * c;
  return std::pow(r2 * r2 + p.t * p.t, 0.25);
}

double koranyi_dist(const HPoint& p, const HPoint& q) {
  require_same_n(p, q);
  // ||q^-1 * p||_K expanded to avoid the temporaries.
  double r2 = 0.0;
  double twist = 0.0;
  for (std::size_t j = 0; j < p.n(); ++j) {
    const double dx = p.x(j) - q.x(j);
    const double dy = p.y(j) - q.y(j);
    r2 += dx * dx + dy * dy;
    twist += q.x(j) * p.y(j) - p.x(j) * q.y(j);
  }
  const double dt = p.t - q.t + 2.0 * twist;
  return std::pow(r2 * r2 + dt * dt, 0.25);
}

double koranyi_dist_flat(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.size() % 2 == 0) {
    throw std::invalid_argument("koranyi_dist_flat: points must share a 2n+1 layout");
  }
  const std::size_t hz = p.size() - 1;
  double r2 = 0.0;
  double twist = 0.0;
  for (std::size_t j = 0; j < hz; j += 2) {
    const double dx = p[j] - q[j];
    const double dy = p[j + 1] - q[j + 1];
    r2 += dx * dx + dy * dy;
    twist += q[j] * p[j + 1] - p[j] * q[j + 1];
  }
  const double dt = p[hz] - q[hz] + 2.0 * twist;
  return std::pow(r2 * r2 + dt * dt, 0.25);
}

double lift_increment(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() % 2 != 0) {
    throw std::invalid_argument("lift_increment: planar points must share an even dimension");
  }
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < a.size(); j += 2) s += b[j] * a[j + 1] - a[j] * b[j + 1];
  return 2.0 * s;
}

HorizontalPath::HorizontalPath(std::vector<std::vector<double>> vertices, double t0)
    : vertices_(std::move(vertices)), t0_(t0) {
  if (vertices_.empty()) throw std::invalid_argument("horizontal path needs at least one vertex");
  const std::size_t dim = vertices_.front().size();
  if (dim == 0 || dim % 2 != 0) throw std::invalid_argument("planar dimension must be even and positive");
  lifted_t_.resize(vertices_.size());
  cumulative_.resize(vertices_.size());
  lifted_t_[0] = t0_;
  cumulative_[0] = 0.0;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    if (vertices_[i + 1].size() != dim) throw std::invalid_argument("ragged polyline");
    lifted_t_[i + 1] = lifted_t_[i] + lift_increment(vertices_[i], vertices_[i + 1]);
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = vertices_[i + 1][c] - vertices_[i][c];
      d2 += d * d;
    }
    cumulative_[i + 1] = cumulative_[i] + std::sqrt(d2);
  }
  total_length_ = cumulative_.back();
}

HPoint HorizontalPath::point_at_vertex(std::size_t i) const { return HPoint(vertices_.at(i), lifted_t_.at(i)); }

HPoint HorizontalPath::at_fraction(double s) const {
  if (total_length_ == 0.0 || s <= 0.0) return start();
  if (s >= 1.0) return end();
  const double target = s * total_length_;
  // First vertex whose cumulative length exceeds the target closes the segment.
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t seg = static_cast<std::size_t>(it - cumulative_.begin());
  seg = std::clamp<std::size_t>(seg, 1, vertices_.size() - 1) - 1;
  const double seg_len = cumulative_[seg + 1] - cumulative_[seg];
  const double u = seg_len > 0.0 ? (target - cumulative_[seg]) / seg_len : 0.0;
  const auto& a = vertices_[seg];
  const auto& b = vertices_[seg + 1];
  std::vector<double> point(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) point[c] = a[c] + u * (b[c] - a[c]);
  const double t = lifted_t_[seg] + lift_increment(a, point);
  return HPoint(std::move(point), t);
}

HorizontalPath HorizontalPath::left_translated(const HPoint& g) const {
  if (g.h.size() != vertices_.front().size()) throw std::invalid_argument("translation dimension mismatch");
  std::vector<std::vector<double>> moved = vertices_;
  for (auto& v : moved) {
    for (std::size_t c = 0; c < v.size(); ++c) v[c] += g.h[c];
  }
  const HPoint first = group_mul(g, start());
  return HorizontalPath(std::move(moved), first.t);
}

double path_length(const HorizontalPath& path) { return path.length(); }

double gamma_h() {
  static const double value = std::pow(1.0 + std::cbrt(16.0), 0.75);
  return value;
}

HorizontalPath connect_points(const HPoint& p, const HPoint& q) {
  require_same_n(p, q);
  const HPoint r = group_mul(group_inv(p), q);
  const std::size_t dim = r.h.size();

  // Built at the origin, then left-translated by p.
  std::vector<std::vector<double>> verts;
  verts.emplace_back(dim, 0.0);
  if (planar_norm(r.h) > 0.0) verts.push_back(r.h);

  // The straight segment from the origin lifts with zero height change, so
  // the whole deficit r.t is closed by a loop of signed area -r.t / 4.
  if (r.t != 0.0) {
    const double side = 0.5 * std::sqrt(std::abs(r.t));
    const std::vector<double> base = verts.back();
    auto corner = [&](double dx, double dy) {
      std::vector<double> v = base;
      v[0] += dx;
      v[1] += dy;
      return v;
    };
    if (r.t < 0.0) {  // counter-clockwise: positive area, height decreases
      verts.push_back(corner(side, 0.0));
      verts.push_back(corner(side, side));
      verts.push_back(corner(0.0, side));
    } else {
      verts.push_back(corner(0.0, side));
      verts.push_back(corner(side, side));
      verts.push_back(corner(side, 0.0));
    }
    verts.push_back(base);
  }

  for (auto& v : verts) {
    for (std::size_t c = 0; c < dim; ++c) v[c] += p.h[c];
  }
  return HorizontalPath(std::move(verts), p.t);
}

void to_json(nlohmann::json& j, const HPoint& p) { j = p.flat(); }

void from_json(const nlohmann::json& j, HPoint& p) {
  const auto flat = j.get<std::vector<double>>();
  p = HPoint::from_flat(flat);
}

void to_json(nlohmann::json& j, const HorizontalPath& path) {
  j = nlohmann::json{{"t0", path.t0()}, {"vertices", path.vertices()}, {"lifted_t", path.lifted_t()}};
}

void from_json(const nlohmann::json& j, HorizontalPath& path) {
  path = HorizontalPath(j.at("vertices").get<std::vector<std::vector<double>>>(), j.at("t0").get<double>());
  if (j.contains("lifted_t")) {
    const auto stored = j.at("lifted_t").get<std::vector<double>>();
    const auto& lifted = path.lifted_t();
    if (stored.size() != lifted.size()) throw std::invalid_argument("lifted_t length mismatch");
    for (std::size_t i = 0; i < stored.size(); ++i) {
      if (std::abs(stored[i] - lifted[i]) > 1e-9 * (1.0 + std::abs(lifted[i]))) {
        throw std::invalid_argument("stored lifted_t disagrees with the exact lift at vertex " +
                                    std::to_string(i));
      }
    }
  }
}

}  // namespace heislift
