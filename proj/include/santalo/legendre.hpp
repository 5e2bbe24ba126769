#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "santalo/kernel.hpp"
#include "santalo/report.hpp"

namespace santalo {

using Vector = Eigen::VectorXd;
using Axes = std::vector<std::vector<double>>;

/// Extended-real function sampled on a tensor grid. Values are stored with
/// the last axis varying fastest; +inf marks points outside the domain.
struct GridFn {
  Axes axes;
  std::vector<double> values;

  int dim() const { return static_cast<int>(axes.size()); }
  std::size_t size() const { return values.size(); }
  std::vector<std::size_t> shape() const;
  std::vector<std::size_t> unravel(std::size_t flat) const;
  Vector node(std::size_t flat) const;
  /// Throws InvalidInput for malformed grids, EmptyDomain when no value is finite.
  void validate() const;

  static GridFn sample(Axes axes, const std::function<double(const Vector&)>& f);
};

std::vector<double> uniform_axis(double lo, double hi, std::size_t count);
Axes uniform_axes(int n, double lo, double hi, std::size_t count);

/// Per-axis range of discrete slopes of phi, sampled with `density` times
/// as many nodes as the primal axis. Densities below one leave gaps between
/// dual nodes wider than the slope steps, which makes the biconjugate defect
/// track the grid spacing instead of aliasing with it.
Axes slope_axes(const GridFn& phi, double density = 1.0);

struct Conjugate {
  GridFn fn;
  /// 1 where the maximizing primal node is interior to the primal grid.
  std::vector<char> trusted;
  std::size_t untrusted = 0;
};

/// Discrete L_z phi(y) = max over nodes x of <x - z, y - z> - phi(x),
/// computed one axis at a time. Empty `dual_axes` means slope_axes(phi).
Conjugate conjugate(const GridFn& phi, const Vector& z, const Axes& dual_axes = {});
GridFn legendre_transform(const GridFn& phi, const Vector& z, const Axes& dual_axes = {});

struct GridIntegral {
  double value = 0.0;
  double coarse = 0.0;          // same rule on every other node
  double error_estimate = 0.0;  // |fine - coarse| / 3
  double excluded_mass = 0.0;   // mass on masked-out nodes
};

/// Trapezoid rule for rho(f) over the grid, skipping nodes with mask 0.
GridIntegral integrate_rho(const GridFn& f, const RhoKernel& rho,
                           const std::vector<char>* mask = nullptr);

struct BiconjugateOptions {
  Axes dual_axes;  // empty: slope_axes(phi)
  double slack_factor = 1.0;
};

Report biconjugate_check(const GridFn& phi, const Vector& z, const BiconjugateOptions& opts = {});

struct CenterSolveOptions {
  double tol = 1e-6;
  Axes dual_axes;
  std::optional<Vector> start;
};

struct CenterSolveResult {
  Vector z0;
  double objective = 0.0;
  double residual = 0.0;
  bool nonunique_possible = false;
  int evaluations = 0;
};

/// Minimizes z -> integral of rho(L phi(y) - <z, y>) over the trusted dual nodes.
CenterSolveResult optimal_center(const GridFn& phi, const RhoKernel& rho,
                                 const CenterSolveOptions& opts = {});

struct LegendreOptions {
  double tol = 1e-2;
  double equality_band = 1e-3;
  std::optional<Vector> z;  // empty: optimal_center
  CenterSolveOptions center;
};

Report legendre_santalo_verify(const GridFn& phi, const RhoKernel& rho,
                               const LegendreOptions& opts = {});

/// Weighted fit phi(x) ~ |T(x - z)|^2 / 2 + c with weights rho(phi(x)).
Report equality_diagnostics(const GridFn& phi, const RhoKernel& rho, const Vector& z);

/// log rho affine on the sampled range [lo, hi].
bool numerically_exponential(const RhoKernel& rho, double lo, double hi);

}  // namespace santalo
