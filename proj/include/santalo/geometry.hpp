#pragma once

#include <cstdint>
#include <vector>

#include "santalo/body.hpp"

namespace santalo {

// Support function h_K(u) = max_{x in K} <x, u>.
double support(const PolytopeV& k, const Vector& u);
double support(const StarBody& k, const Vector& u);
double support(const ConvexBody& k, const Vector& u);

/// Support values of (points - shift) for every node of a grid, in node order.
std::vector<double> support_on_grid(const std::vector<Vector>& points, const Vector& shift,
                                    const SphereGrid& grid);

/// Gauge ||x||_K; zero at the origin.
double gauge(const StarBody& k, const Vector& x);
/// Gauge of a polytope containing the origin in its interior.
double gauge(const PolytopeV& k, const Vector& x);
double gauge(const ConvexBody& k, const Vector& x);

double volume_star(const StarBody& k);
double volume_polytope(const PolytopeV& k);
double volume(const ConvexBody& k);

Vector centroid(const PolytopeV& k);
Vector centroid(const StarBody& k);
Vector centroid(const ConvexBody& k);

/// Second moment matrix, the integral of x x^T over K.
Eigen::MatrixXd second_moment(const PolytopeV& k);
Eigen::MatrixXd second_moment(const StarBody& k);
Eigen::MatrixXd second_moment(const ConvexBody& k);

double diameter(const ConvexBody& k);

struct ConvexityOptions {
  std::size_t pairs = 20000;
  double tol = 1e-6;
  std::uint64_t seed = 1;
};

struct ConvexityCheck {
  bool convex = true;
  double worst_excess = 0.0;  // max of gauge(chord point) - 1
  Vector witness_a;
  Vector witness_b;
};

/// Chord test on boundary samples: every point of a chord between two
/// boundary samples must have gauge <= 1 + tol. The gauge uses the largest
/// nearby radial sample so that interpolation error is never reported as a
/// violation.
ConvexityCheck check_convexity(const StarBody& k, const ConvexityOptions& opts = {});
bool certify_convex(const StarBody& k, const ConvexityOptions& opts = {});

bool is_centrally_symmetric(const ConvexBody& k, double tol = 1e-9);
bool is_unconditional(const ConvexBody& k, double tol = 1e-6);

}  // namespace santalo
