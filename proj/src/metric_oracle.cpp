#include "heislift/metric_oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "heislift/errors.hpp"

namespace heislift {

TargetSpace TargetSpace::euclidean(int d) {
  if (d < 1) throw std::invalid_argument("Euclidean target needs d >= 1");
  return TargetSpace(TargetKind::Euclidean, d, 1.0);
}

TargetSpace TargetSpace::heisenberg(int n) {
  if (n < 1) throw std::invalid_argument("Heisenberg target needs n >= 1");
  return TargetSpace(TargetKind::Heisenberg, n, gamma_h());
}

std::string TargetSpace::name() const {
  return (kind_ == TargetKind::Euclidean ? "euclidean(" : "heisenberg(") + std::to_string(dim_) + ")";
}

void TargetSpace::check_point(std::span<const double> a) const {
  if (static_cast<int>(a.size()) != ambient_dim()) {
    throw std::invalid_argument("point with " + std::to_string(a.size()) + " coordinates does not belong to " +
                                name());
  }
}

double TargetSpace::dist(std::span<const double> a, std::span<const double> b) const {
  check_point(a);
  check_point(b);
  if (kind_ == TargetKind::Heisenberg) return koranyi_dist_flat(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

TargetPoint TargetSpace::dilate(std::span<const double> a, double lambda) const {
  check_point(a);
  TargetPoint out(a.begin(), a.end());
  for (double& c : out) c *= lambda;
  if (kind_ == TargetKind::Heisenberg) out.back() *= lambda;
  return out;
}

CellMap::CellMap(int dimension, LinearCell cell, double lipschitz)
    : dim_(dimension), rep_(std::move(cell)), lipschitz_(lipschitz) {
  if (static_cast<int>(std::get<LinearCell>(rep_).vertex_values.size()) != dim_ + 1) {
    throw std::invalid_argument("linear cell needs dimension+1 vertex values");
  }
}

CellMap::CellMap(PathCell cell, double lipschitz) : dim_(1), rep_(std::move(cell)), lipschitz_(lipschitz) {}

TargetPoint CellMap::evaluate(std::span<const double> bary) const {
  if (static_cast<int>(bary.size()) != dim_ + 1) throw std::invalid_argument("barycentric size mismatch");
  if (const auto* path = std::get_if<PathCell>(&rep_)) {
    if (bary[1] <= 0.0) return path->start;
    if (bary[0] <= 0.0) return path->end;
    return path->path.at_fraction(bary[1]).flat();
  }
  const auto& values = std::get<LinearCell>(rep_).vertex_values;
  for (int i = 0; i <= dim_; ++i) {
    if (bary[i] == 1.0) return values[i];
  }
  TargetPoint out(values.front().size(), 0.0);
  for (int i = 0; i <= dim_; ++i) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += bary[i] * values[i][c];
  }
  return out;
}

TargetPoint CellMap::vertex_value(int i) const {
  if (const auto* path = std::get_if<PathCell>(&rep_)) return i == 0 ? path->start : path->end;
  return std::get<LinearCell>(rep_).vertex_values.at(i);
}

double affine_lipschitz(const std::vector<std::vector<double>>& vertices, const std::vector<TargetPoint>& values) {
  const int k = static_cast<int>(vertices.size()) - 1;
  if (k < 1) return 0.0;
  const int m = static_cast<int>(vertices.front().size());
  const int d = static_cast<int>(values.front().size());
  Eigen::MatrixXd edges(m, k);
  Eigen::MatrixXd diffs(d, k);
  for (int j = 0; j < k; ++j) {
    for (int r = 0; r < m; ++r) edges(r, j) = vertices[j + 1][r] - vertices[0][r];
    for (int r = 0; r < d; ++r) diffs(r, j) = values[j + 1][r] - values[0][r];
  }
  // Tangent vector E c has length |R c| with E = QR, so the constant is the
  // largest singular value of D R^-1.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(edges);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd a = diffs * r.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

CellMap fill_sphere(const TargetSpace& target, int k, const CellBoundary& boundary) {
  if (!target.supports_fill(k)) throw UnsupportedFill(target.name(), k);
  if (static_cast<int>(boundary.vertices.size()) != k + 2 || boundary.values.size() != boundary.vertices.size()) {
    throw std::invalid_argument("fill_sphere: a (k+1)-cell needs k+2 vertices and values");
  }
  for (const auto& v : boundary.values) target.check_point(v);

  if (target.kind() == TargetKind::Heisenberg) {
    const HPoint a = HPoint::from_flat(boundary.values[0]);
    const HPoint b = HPoint::from_flat(boundary.values[1]);
    double edge = 0.0;
    for (std::size_t c = 0; c < boundary.vertices[0].size(); ++c) {
      const double d = boundary.vertices[1][c] - boundary.vertices[0][c];
      edge += d * d;
    }
    edge = std::sqrt(edge);
    if (edge == 0.0) throw std::invalid_argument("fill_sphere: degenerate edge");
    PathCell cell{connect_points(a, b), boundary.values[0], boundary.values[1]};
    const double lip = cell.path.length() / edge;
    return CellMap(std::move(cell), lip);
  }

  // Cone over the barycenter with the mean boundary value. The facets carry
  // affine maps, so the cone is the affine interpolation of the vertex values
  // and the boundary constant is not increased.
  LinearCell cell{boundary.values};
  const double lip = affine_lipschitz(boundary.vertices, boundary.values);
  return CellMap(k + 1, std::move(cell), lip);
}

void to_json(nlohmann::json& j, const TargetSpace& y) {
  j = nlohmann::json{{"kind", y.kind() == TargetKind::Euclidean ? "euclidean" : "heisenberg"},
                     {"dim", y.dimension()},
                     {"gamma", y.gamma()}};
}

TargetSpace target_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const int dim = j.at("dim").get<int>();
  if (kind == "euclidean") return TargetSpace::euclidean(dim);
  if (kind == "heisenberg") return TargetSpace::heisenberg(dim);
  throw std::invalid_argument("unknown target kind '" + kind + "'");
}

void to_json(nlohmann::json& j, const CellMap& c) {
  if (c.is_path()) {
    const auto& p = c.path_cell();
    j = nlohmann::json{{"type", "path"}, {"lipschitz", c.lipschitz()}, {"path", p.path}, {"start", p.start},
                       {"end", p.end}};
  } else {
    j = nlohmann::json{{"type", "linear"},
                       {"dim", c.dimension()},
                       {"lipschitz", c.lipschitz()},
                       {"values", c.linear_cell().vertex_values}};
  }
}

CellMap cell_from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  const double lip = j.at("lipschitz").get<double>();
  if (type == "path") {
    PathCell cell{j.at("path").get<HorizontalPath>(), j.at("start").get<TargetPoint>(),
                  j.at("end").get<TargetPoint>()};
    const auto s = cell.path.start().flat();
    const auto e = cell.path.end().flat();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double tol = 1e-9 * std::max({1.0, std::abs(cell.start[i]), std::abs(cell.end[i])});
      if (std::abs(s[i] - cell.start[i]) > tol || std::abs(e[i] - cell.end[i]) > tol) {
        throw std::invalid_argument("edge path endpoints disagree with the stored vertex values");
      }
    }
    return CellMap(std::move(cell), lip);
  }
  if (type == "linear") {
    return CellMap(j.at("dim").get<int>(), LinearCell{j.at("values").get<std::vector<TargetPoint>>()}, lip);
  }
  throw std::invalid_argument("unknown cell type '" + type + "'");
}

}  // namespace heislift
