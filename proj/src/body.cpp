#include "santalo/body.hpp"

#include <cmath>
#include <numbers>

#include "santalo/error.hpp"
#include "santalo/hull.hpp"

namespace santalo {

double ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

PolytopeV::PolytopeV(std::vector<Vector> vertices) : vertices_(std::move(vertices)) {
  require(!vertices_.empty(), ErrorCode::DegenerateBody, "polytope has no vertices");
  const auto n = vertices_.front().size();
  require(n >= 1, ErrorCode::InvalidInput, "polytope dimension must be >= 1");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    require(vertices_[i].size() == n, ErrorCode::InvalidInput, "vertex dimensions differ");
    require(vertices_[i].allFinite(), ErrorCode::InvalidInput, "vertex has non-finite entries");
    for (std::size_t j = 0; j < i; ++j) {
      require((vertices_[i] - vertices_[j]).norm() > 1e-12, ErrorCode::InvalidInput,
              "duplicate vertices " + std::to_string(j) + " and " + std::to_string(i));
    }
  }
}

StarBody::StarBody(GridPtr grid, std::vector<double> radial, std::vector<Vector> extreme_points)
    : grid_(std::move(grid)), radial_(std::move(radial)), extreme_(std::move(extreme_points)) {
  require(grid_ != nullptr, ErrorCode::InvalidInput, "star body without grid");
  require(radial_.size() == grid_->size(), ErrorCode::InvalidInput,
          "radial sample count does not match grid size");
  for (double r : radial_) {
    require(std::isfinite(r) && r > 0.0, ErrorCode::DegenerateBody,
            "radial function must be finite and positive");
  }
}

Vector StarBody::boundary_point(std::size_t i) const {
  return radial_[i] * grid_->node(i);
}

double StarBody::radial_at(const Vector& unit) const {
  const Stencil s = grid_->locate(unit);
  double r = 0.0;
  for (int k = 0; k < s.count; ++k) r += s.weight[k] * radial_[s.index[k]];
  return r;
}

double StarBody::radial_upper(const Vector& unit) const {
  if (dim() <= 2) {
    const Stencil s = grid_->locate(unit);
    double r = 0.0;
    for (int k = 0; k < s.count; ++k) r = std::max(r, radial_[s.index[k]]);
    return r;
  }
  double r = 0.0;
  for (auto i : grid_->nearest(unit, static_cast<std::size_t>(2 * dim()))) r = std::max(r, radial_[i]);
  return r;
}

StarBody StarBody::scaled(double t) const {
  require(t > 0.0, ErrorCode::InvalidInput, "scale factor must be positive");
  std::vector<double> r(radial_);
  for (double& v : r) v *= t;
  std::vector<Vector> ext(extreme_);
  for (auto& p : ext) p *= t;
  return StarBody(grid_, std::move(r), std::move(ext));
}

int dim(const ConvexBody& body) {
  return std::visit([](const auto& b) { return b.dim(); }, body);
}

PolytopeV make_cube(int n, double half_side) {
  require(n >= 1 && n <= 16, ErrorCode::InvalidInput, "cube dimension out of range");
  std::vector<Vector> v;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Vector p(n);
    for (int i = 0; i < n; ++i) p(i) = (mask >> i) & 1u ? half_side : -half_side;
    v.push_back(p);
  }
  return PolytopeV(std::move(v));
}

PolytopeV make_cross_polytope(int n, double radius) {
  std::vector<Vector> v;
  for (int i = 0; i < n; ++i) {
    v.push_back(radius * Vector::Unit(n, i));
    v.push_back(-radius * Vector::Unit(n, i));
  }
  return PolytopeV(std::move(v));
}

PolytopeV make_simplex(int n) {
  std::vector<Vector> v{Vector::Zero(n)};
  for (int i = 0; i < n; ++i) v.push_back(Vector::Unit(n, i));
  return PolytopeV(std::move(v));
}

PolytopeV make_regular_polygon(int sides, double circumradius, double phase) {
  require(sides >= 3, ErrorCode::InvalidInput, "polygon needs at least 3 sides");
  std::vector<Vector> v;
  for (int k = 0; k < sides; ++k) {
    const double t = phase + 2.0 * std::numbers::pi * k / sides;
    Vector p(2);
    p << circumradius * std::cos(t), circumradius * std::sin(t);
    v.push_back(p);
  }
  return PolytopeV(std::move(v));
}

StarBody make_ball(int n, double radius, int grid_size) {
  auto grid = SphereGrid::make(n, grid_size);
  return StarBody(grid, std::vector<double>(grid->size(), radius));
}

StarBody make_shifted_ball(const Vector& center, double radius, int grid_size) {
  require(center.norm() < radius, ErrorCode::CenterOutside,
          "origin must lie inside the shifted ball");
  auto grid = SphereGrid::make(static_cast<int>(center.size()), grid_size);
  std::vector<double> r(grid->size());
  const double c2 = center.squaredNorm();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double cu = center.dot(grid->node(i));
    r[i] = cu + std::sqrt(cu * cu - c2 + radius * radius);
  }
  return StarBody(grid, std::move(r));
}

StarBody make_ellipsoid(const Eigen::MatrixXd& T, int grid_size) {
  require(T.rows() == T.cols(), ErrorCode::InvalidInput, "ellipsoid map must be square");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(T);
  require(lu.isInvertible(), ErrorCode::DegenerateBody, "ellipsoid map is singular");
  const Eigen::MatrixXd inv = lu.inverse();
  auto grid = SphereGrid::make(static_cast<int>(T.rows()), grid_size);
  std::vector<double> r(grid->size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 1.0 / (inv * grid->node(i)).norm();
  return StarBody(grid, std::move(r));
}

StarBody to_star(const PolytopeV& p, int grid_size) {
  const auto facets = hull_facets(p.vertices());
  for (const auto& f : facets) {
    require(f.offset > 1e-12, ErrorCode::CenterOutside,
            "origin is not interior to the polytope");
  }
  auto grid = SphereGrid::make(p.dim(), grid_size);
  std::vector<double> r(grid->size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    double g = 0.0;
    for (const auto& f : facets) g = std::max(g, f.normal.dot(grid->node(i)) / f.offset);
    r[i] = 1.0 / g;
  }
  std::vector<Vector> ext;
  for (auto i : extreme_points(p.vertices())) ext.push_back(p.vertices()[i]);
  return StarBody(grid, std::move(r), std::move(ext));
}

StarBody to_star(const ConvexBody& body, int grid_size) {
  if (const auto* s = std::get_if<StarBody>(&body)) return *s;
  return to_star(std::get<PolytopeV>(body), grid_size);
}

}  // namespace santalo
