#include "heislift/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace heislift {

bool Box::contains(std::span<const double> x) const {
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

bool Box::contains_strictly(std::span<const double> x) const {
  for (int i = 0; i < dim(); ++i) {
    if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
  return v;
}

double Box::diameter() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// CompactSet

namespace {

constexpr std::uint32_t kLeafSize = 8;

double point_box_d2(std::span<const double> x, const std::vector<double>& lo, const std::vector<double>& hi) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = 0.0;
    if (x[i] < lo[i]) d = lo[i] - x[i];
    else if (x[i] > hi[i]) d = x[i] - hi[i];
    s += d * d;
  }
  return s;
}

double box_box_d2(std::span<const double> alo, std::span<const double> ahi, const std::vector<double>& blo,
                  const std::vector<double>& bhi) {
  double s = 0.0;
  for (std::size_t i = 0; i < alo.size(); ++i) {
    double d = 0.0;
    if (ahi[i] < blo[i]) d = blo[i] - ahi[i];
    else if (bhi[i] < alo[i]) d = alo[i] - bhi[i];
    s += d * d;
  }
  return s;
}

}  // namespace

CompactSet::CompactSet(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw std::invalid_argument("compact set needs at least one point");
  m_ = static_cast<int>(points.front().size());
  if (m_ < 1) throw std::invalid_argument("points need at least one coordinate");
  count_ = points.size();
  coords_.reserve(count_ * m_);
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != m_) throw std::invalid_argument("points of mixed dimension");
    for (double c : p) {
      if (!std::isfinite(c)) throw std::invalid_argument("non-finite site coordinate");
      coords_.push_back(c);
    }
  }
  order_.resize(count_);
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * count_ / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(count_));
}

std::int32_t CompactSet::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo.assign(m_, std::numeric_limits<double>::infinity());
  node.hi.assign(m_, -std::numeric_limits<double>::infinity());
  for (std::uint32_t i = begin; i < end; ++i) {
    const auto p = point(order_[i]);
    for (int c = 0; c < m_; ++c) {
      node.lo[c] = std::min(node.lo[c], p[c]);
      node.hi[c] = std::max(node.hi[c], p[c]);
    }
  }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  for (int c = 1; c < m_; ++c) {
    if (node.hi[c] - node.lo[c] > node.hi[axis] - node.lo[axis]) axis = c;
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return coords_[a * m_ + axis] < coords_[b * m_ + axis]; });
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void CompactSet::search(std::int32_t id, std::span<const double> x, double& best_d2, std::size_t& best) const {
  const Node& node = nodes_[id];
  // Equal bounds can still hide a lower-index tie.
  if (point_box_d2(x, node.lo, node.hi) > best_d2) return;
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      const auto p = point(idx);
      double d2 = 0.0;
      for (int c = 0; c < m_; ++c) d2 += (x[c] - p[c]) * (x[c] - p[c]);
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
    return;
  }
  const double dl = point_box_d2(x, nodes_[node.left].lo, nodes_[node.left].hi);
  const double dr = point_box_d2(x, nodes_[node.right].lo, nodes_[node.right].hi);
  if (dl <= dr) {
    search(node.left, x, best_d2, best);
    search(node.right, x, best_d2, best);
  } else {
    search(node.right, x, best_d2, best);
    search(node.left, x, best_d2, best);
  }
}

CompactSet::Nearest CompactSet::nearest(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != m_) throw std::invalid_argument("query dimension mismatch");
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best = count_;
  search(0, x, best_d2, best);
  return {best, std::sqrt(best_d2)};
}

void CompactSet::search_box(std::int32_t id, std::span<const double> lo, std::span<const double> hi,
                            double& best_d2) const {
  const Node& node = nodes_[id];
  if (box_box_d2(lo, hi, node.lo, node.hi) >= best_d2) return;
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const auto p = point(order_[i]);
      double d2 = 0.0;
      for (int c = 0; c < m_; ++c) {
        double d = 0.0;
        if (p[c] < lo[c]) d = lo[c] - p[c];
        else if (p[c] > hi[c]) d = p[c] - hi[c];
        d2 += d * d;
      }
      best_d2 = std::min(best_d2, d2);
    }
    return;
  }
  search_box(node.left, lo, hi, best_d2);
  search_box(node.right, lo, hi, best_d2);
}

double CompactSet::box_distance(std::span<const double> lo, std::span<const double> hi) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  search_box(0, lo, hi, best_d2);
  return std::sqrt(best_d2);
}

// ---------------------------------------------------------------------------
// Dyadic cubes

double DyadicFrame::side(int generation) const { return std::ldexp(root_side, -generation); }

double DyadicFrame::diameter(int generation) const { return side(generation) * std::sqrt(static_cast<double>(dim())); }

Box WhitneyCube::box(const DyadicFrame& frame) const {
  const double s = frame.side(generation);
  Box b;
  b.lo.resize(lattice.size());
  b.hi.resize(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    b.lo[i] = frame.origin[i] + static_cast<double>(lattice[i]) * s;
    b.hi[i] = frame.origin[i] + static_cast<double>(lattice[i] + 1) * s;
  }
  return b;
}

std::size_t CubeKeyHash::operator()(const WhitneyCube& c) const noexcept {
  std::size_t h = std::hash<int>{}(c.generation);
  for (auto v : c.lattice) h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

long Decomposition::find(const WhitneyCube& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

void Decomposition::build_index() {
  index_.clear();
  index_.reserve(cubes.size());
  min_gen_ = std::numeric_limits<int>::max();
  max_gen_ = 0;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    index_.emplace(cubes[i], i);
    min_gen_ = std::min(min_gen_, cubes[i].generation);
    max_gen_ = std::max(max_gen_, cubes[i].generation);
  }
  if (cubes.empty()) min_gen_ = 0;
}

std::vector<std::size_t> Decomposition::cubes_containing(std::span<const double> x) const {
  std::vector<std::size_t> out;
  if (cubes.empty()) return out;
  const int m = frame.dim();
  std::vector<std::int64_t> base(m);
  std::vector<int> options(m);
  WhitneyCube key;
  key.lattice.resize(m);
  for (int g = min_gen_; g <= max_gen_; ++g) {
    const double s = frame.side(g);
    for (int i = 0; i < m; ++i) {
      const double u = (x[i] - frame.origin[i]) / s;
      const double r = std::round(u);
      // On a lattice plane (up to rounding) the point also belongs to the cell below.
      if (std::abs(u - r) <= 1e-9) {
        base[i] = static_cast<std::int64_t>(r);
        options[i] = 2;
      } else {
        base[i] = static_cast<std::int64_t>(std::floor(u));
        options[i] = 1;
      }
    }
    const int combos = 1 << m;
    for (int mask = 0; mask < combos; ++mask) {
      bool valid = true;
      for (int i = 0; i < m && valid; ++i) {
        const int bit = (mask >> i) & 1;
        if (bit && options[i] == 1) valid = false;
        key.lattice[i] = base[i] - bit;
      }
      if (!valid) continue;
      key.generation = g;
      const long id = find(key);
      if (id >= 0) out.push_back(static_cast<std::size_t>(id));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DyadicFrame root_frame(const Box& omega) {
  const int m = omega.dim();
  double extent = 0.0;
  for (int i = 0; i < m; ++i) extent = std::max(extent, omega.hi[i] - omega.lo[i]);
  if (!(extent > 0.0)) throw std::invalid_argument("omega must have positive extent");
  DyadicFrame frame;
  frame.root_side = extent * 4.0 / 3.0;
  frame.origin.resize(m);
  for (int i = 0; i < m; ++i) frame.origin[i] = 0.5 * (omega.lo[i] + omega.hi[i]) - 0.5 * frame.root_side;
  return frame;
}

namespace {

bool boxes_touch(const Box& a, const Box& b) {
  for (int i = 0; i < a.dim(); ++i) {
    if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
  }
  return true;
}

}  // namespace

Decomposition decompose(const CompactSet& z, const Box& omega, int max_generation) {
  const int m = z.dim();
  if (omega.dim() != m) throw std::invalid_argument("omega dimension does not match Z");
  if (max_generation < 0) throw std::invalid_argument("max_generation must be non-negative");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!omega.contains_strictly(z.point(i))) {
      throw std::invalid_argument("site " + std::to_string(i) + " is not strictly inside omega");
    }
  }

  Decomposition dec;
  dec.frame = root_frame(omega);
  dec.omega = omega;
  dec.max_generation = max_generation;

  std::vector<WhitneyCube> stack;
  stack.push_back(WhitneyCube{0, std::vector<std::int64_t>(m, 0)});
  std::vector<std::pair<WhitneyCube, double>> accepted;
  while (!stack.empty()) {
    WhitneyCube q = std::move(stack.back());
    stack.pop_back();
    const Box b = q.box(dec.frame);
    if (!boxes_touch(b, omega)) continue;
    const double d = z.box_distance(b.lo, b.hi);
    // Slack absorbs rounding in exact ties d(Q,Z) = diam(Q).
    if (dec.frame.diameter(q.generation) * (1.0 - 1e-12) <= d) {
      accepted.emplace_back(std::move(q), d);
      continue;
    }
    if (q.generation == max_generation) {
      dec.unresolved.push_back(std::move(q));
      continue;
    }
    for (int mask = 0; mask < (1 << m); ++mask) {
      WhitneyCube child{q.generation + 1, q.lattice};
      for (int i = 0; i < m; ++i) child.lattice[i] = 2 * q.lattice[i] + ((mask >> i) & 1);
      stack.push_back(std::move(child));
    }
  }
  std::sort(accepted.begin(), accepted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  dec.cubes.reserve(accepted.size());
  dec.cube_distance.reserve(accepted.size());
  for (auto& [cube, d] : accepted) {
    dec.cubes.push_back(std::move(cube));
    dec.cube_distance.push_back(d);
  }
  std::sort(dec.unresolved.begin(), dec.unresolved.end());
  dec.build_index();
  return dec;
}

NeighborStats neighbor_stats(const Decomposition& dec) {
  NeighborStats out;
  if (dec.cubes.empty()) return out;
  const int m = dec.frame.dim();
  const int gmin = dec.min_present_generation();
  const int gmax = dec.max_present_generation();
  WhitneyCube key;
  std::vector<std::int64_t> lo(m), hi(m), cur(m);
  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    const auto& q = dec.cubes[i];
    int neighbors = 0;
    for (int g2 = std::max(gmin, q.generation - 2); g2 <= std::min(gmax, q.generation + 2); ++g2) {
      // Cells [k, k+1] at generation g2 that meet the closed cube.
      for (int a = 0; a < m; ++a) {
        const std::int64_t l = q.lattice[a];
        if (g2 >= q.generation) {
          const std::int64_t s = std::int64_t{1} << (g2 - q.generation);
          lo[a] = l * s - 1;
          hi[a] = (l + 1) * s;
        } else {
          const std::int64_t s = std::int64_t{1} << (q.generation - g2);
          lo[a] = (l + s - 1) / s - 1;  // ceil(l / s) - 1, l >= 0
          hi[a] = (l + 1) / s;
        }
        cur[a] = lo[a];
      }
      while (true) {
        key.generation = g2;
        key.lattice = cur;
        const long id = dec.find(key);
        if (id >= 0 && static_cast<std::size_t>(id) != i) {
          ++neighbors;
          out.max_generation_jump = std::max(out.max_generation_jump, std::abs(g2 - q.generation));
        }
        int a = 0;
        while (a < m && ++cur[a] > hi[a]) {
          cur[a] = lo[a];
          ++a;
        }
        if (a == m) break;
      }
    }
    out.max_neighbors = std::max(out.max_neighbors, neighbors);
  }
  return out;
}

bool WhitneyReport::ok() const {
  if (cube_count == 0) return true;
  return min_ratio >= 1.0 - 1e-12 && max_ratio <= 4.0 + 1e-12 && max_neighbors <= neighbor_limit &&
         max_generation_jump <= 1;
}

WhitneyReport verify_whitney(const Decomposition& dec, const CompactSet& z) {
  const int m = dec.frame.dim();
  WhitneyReport r;
  r.cube_count = dec.cubes.size();
  r.unresolved_count = dec.unresolved.size();
  r.neighbor_limit = static_cast<int>(std::pow(12.0, m));
  r.min_ratio = std::numeric_limits<double>::infinity();
  r.max_ratio = 0.0;
  if (dec.cubes.empty()) {
    r.min_ratio = 0.0;
    return r;
  }

  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    const Box b = dec.cubes[i].box(dec.frame);
    // Recomputed here rather than trusted from the decomposition.
    const double d = z.box_distance(b.lo, b.hi);
    const double ratio = d / dec.frame.diameter(dec.cubes[i].generation);
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }

  const NeighborStats ns = neighbor_stats(dec);
  r.max_neighbors = ns.max_neighbors;
  r.max_generation_jump = ns.max_generation_jump;
  return r;
}

void to_json(nlohmann::json& j, const Box& b) { j = nlohmann::json{{"lo", b.lo}, {"hi", b.hi}}; }

void from_json(const nlohmann::json& j, Box& b) {
  b.lo = j.at("lo").get<std::vector<double>>();
  b.hi = j.at("hi").get<std::vector<double>>();
  if (b.lo.size() != b.hi.size() || b.lo.empty()) throw std::invalid_argument("box corners must share a dimension");
  for (std::size_t i = 0; i < b.lo.size(); ++i) {
    if (!(b.lo[i] < b.hi[i])) throw std::invalid_argument("box must have lo < hi on every axis");
  }
}

void to_json(nlohmann::json& j, const WhitneyReport& r) {
  j = nlohmann::json{{"cube_count", r.cube_count},
                     {"unresolved_count", r.unresolved_count},
                     {"min_ratio", r.min_ratio},
                     {"max_ratio", r.max_ratio},
                     {"max_neighbors", r.max_neighbors},
                     {"neighbor_limit", r.neighbor_limit},
                     {"max_generation_jump", r.max_generation_jump},
                     {"ok", r.ok()}};
}

nlohmann::json cubes_to_json(const Decomposition& dec) {
  auto encode = [&](const std::vector<WhitneyCube>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : list) {
      arr.push_back({{"generation", c.generation}, {"lattice", c.lattice}, {"side", dec.frame.side(c.generation)}});
    }
    return arr;
  };
  return nlohmann::json{{"root", {{"origin", dec.frame.origin}, {"side", dec.frame.root_side}}},
                        {"omega", dec.omega},
                        {"max_generation", dec.max_generation},
                        {"cubes", encode(dec.cubes)},
                        {"unresolved", encode(dec.unresolved)}};
}

}  // namespace heislift
