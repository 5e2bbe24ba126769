#pragma once

#include <span>
#include <variant>
#include <vector>

#include "santalo/sphere_grid.hpp"

namespace santalo {

/// Volume of the Euclidean unit ball, pi^{n/2} / Gamma(n/2 + 1).
double ball_volume(int n);

struct BallConstants {
  int n = 0;
  double v_n = 0.0;
  static BallConstants of(int n) { return {n, ball_volume(n)}; }
};

/// Convex polytope given by a vertex list (interior points are tolerated
/// and discarded by hull computations).
class PolytopeV {
 public:
  explicit PolytopeV(std::vector<Vector> vertices);

  int dim() const { return static_cast<int>(vertices_.front().size()); }
  const std::vector<Vector>& vertices() const { return vertices_; }

 private:
  std::vector<Vector> vertices_;
};

/// Body star-shaped with respect to the origin, stored as radial function
/// samples on a sphere grid. Optional exact points of K (for instance the
/// vertices of the polytope it was encoded from) sharpen support queries.
class StarBody {
 public:
  StarBody(GridPtr grid, std::vector<double> radial, std::vector<Vector> extreme_points = {});

  int dim() const { return grid_->dim(); }
  const SphereGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> radial() const { return radial_; }
  double radial(std::size_t i) const { return radial_[i]; }
  const std::vector<Vector>& extreme_points() const { return extreme_; }

  /// Boundary sample r(u_i) u_i.
  Vector boundary_point(std::size_t i) const;

  /// Radial function at an arbitrary unit direction (interpolated).
  double radial_at(const Vector& unit) const;

  /// Largest radial value among the nodes surrounding a direction; a bound
  /// that absorbs interpolation error.
  double radial_upper(const Vector& unit) const;

  StarBody scaled(double t) const;

 private:
  GridPtr grid_;
  std::vector<double> radial_;
  std::vector<Vector> extreme_;
};

using ConvexBody = std::variant<PolytopeV, StarBody>;

int dim(const ConvexBody& body);

// Stock bodies.
PolytopeV make_cube(int n, double half_side = 1.0);
PolytopeV make_cross_polytope(int n, double radius = 1.0);
PolytopeV make_simplex(int n);  // conv(0, e_1, ..., e_n)
PolytopeV make_regular_polygon(int sides, double circumradius = 1.0, double phase = 0.0);
StarBody make_ball(int n, double radius = 1.0, int grid_size = 0);
/// Ball B(center, radius) seen from the origin; requires |center| < radius.
StarBody make_shifted_ball(const Vector& center, double radius, int grid_size = 0);
/// Ellipsoid T(B_2^n) for invertible T.
StarBody make_ellipsoid(const Eigen::MatrixXd& T, int grid_size = 0);

/// Star encoding of a polytope containing the origin in its interior.
StarBody to_star(const PolytopeV& p, int grid_size = 0);
StarBody to_star(const ConvexBody& body, int grid_size = 0);

}  // namespace santalo
