#pragma once

#include "santalo/body.hpp"
#include "santalo/report.hpp"

namespace santalo {

struct SteinerResult {
  ConvexBody body;
  Vector direction;
  double volume_before = 0.0;
  double volume_after = 0.0;
  bool exact = false;  // polytope path
};

/// Steiner symmetral about the hyperplane u^perp. Polytopes in n <= 3 are
/// handled exactly; everything else goes through the radial function on
/// the body's sphere grid, with chords found by root-finding along lines.
SteinerResult steiner_symmetrize(const ConvexBody& k, const Vector& u, int grid_size = 0);

/// Chord [lo, hi] of k along the line p + t u; empty when lo > hi.
std::pair<double, double> chord(const ConvexBody& k, const Vector& p, const Vector& u);

/// Reflection x -> x - 2 <x, u> u maps the body into itself within tol.
bool reflection_symmetric(const ConvexBody& k, const Vector& u, double tol);

/// vp(S_u K, 0) >= vp(K, 0) (1 - tol) for centrally symmetric K.
Report volume_product_monotonicity(const ConvexBody& k, const Vector& u, double tol = 1e-2,
                                   int grid_size = 0);

/// Compares h_{K-c}(u)^2 with the normalised second moment
/// (n+2)/|K| u^T M u about the centroid c. The two agree for every u exactly
/// when K is an ellipsoid.
struct EllipsoidTest {
  double defect = 0.0;  // max over grid directions of |h^2 - m| / h^2
  bool is_ellipsoid = false;
  Vector worst_direction;
};

EllipsoidTest ellipsoid_test(const ConvexBody& k, double tol = 1e-2, int grid_size = 0);
Report ellipsoid_report(const ConvexBody& k, double tol = 1e-2, int grid_size = 0);

}  // namespace santalo
