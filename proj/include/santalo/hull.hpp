#pragma once

#include <array>
#include <vector>

#include "santalo/sphere_grid.hpp"

namespace santalo {

/// Supporting hyperplane {x : <normal, x> = offset} with unit outward normal.
struct Facet {
  Vector normal;
  double offset = 0.0;
  std::vector<std::size_t> vertices;
};

/// Affine dimension of a point set (rank of the differences).
int affine_dimension(const std::vector<Vector>& pts, double rel_tol = 1e-10);

/// Facets of conv(pts) for a full-dimensional point set in R^n.
std::vector<Facet> hull_facets(const std::vector<Vector>& pts);

/// Indices of the extreme points of conv(pts).
std::vector<std::size_t> extreme_points(const std::vector<Vector>& pts);

/// Pulling triangulation of conv(pts): each simplex lists n+1 point indices.
using Simplex = std::vector<std::size_t>;
std::vector<Simplex> triangulate(const std::vector<Vector>& pts);

/// Moments of a union of simplices with disjoint interiors.
struct Moments {
  double volume = 0.0;
  Vector first;            // integral of x
  Eigen::MatrixXd second;  // integral of x x^T
};
Moments simplex_moments(const std::vector<Vector>& pts, const std::vector<Simplex>& simplices);

/// Counter-clockwise convex hull of planar points (monotone chain).
std::vector<std::size_t> convex_hull_2d(const std::vector<Vector>& pts);

}  // namespace santalo
