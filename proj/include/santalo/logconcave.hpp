#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "santalo/body.hpp"
#include "santalo/kernel.hpp"
#include "santalo/report.hpp"

namespace santalo {

using Evaluator = std::function<double(const Vector&)>;

/// Envelope a chi_{bB}(x - center) <= f(x) <= d e^{-c|x|}.
struct DecayBound {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double d = 1.0;
};

/// One-dimensional log-concave factor for product families.
struct Factor1D {
  enum class Kind { Gaussian, Laplace, OneSided, Uniform };
  Kind kind = Kind::Gaussian;
  double p = 1.0;  // Gaussian: alpha; Laplace, OneSided: lambda; Uniform: a
  double q = 0.0;  // Gaussian, Laplace: mu; OneSided: start; Uniform: b

  double potential(double x) const;
  DecayBound decay() const;
  std::vector<double> kinks() const;
  double median() const;
};

namespace family {
struct Gaussian {  // e^{-|Tx|^2}
  Eigen::MatrixXd t;
};
struct PolytopeIndicator {
  PolytopeV body;
};
struct EllipsoidIndicator {  // chi_{T B}
  Eigen::MatrixXd t;
};
struct ExpGauge {  // e^{-||x||_K}, origin interior to K
  PolytopeV body;
};
struct Product {
  std::vector<Factor1D> factors;
};
struct Custom {
  int dim = 1;
  std::function<double(const Vector&)> potential;
  DecayBound decay;
  Vector center;
  std::string label;
};
}  // namespace family

/// f(x) = scale * F(x - shift) for one of the families above.
class LogConcaveFn {
 public:
  using Family = std::variant<family::Gaussian, family::PolytopeIndicator, family::EllipsoidIndicator,
                              family::ExpGauge, family::Product, family::Custom>;

  explicit LogConcaveFn(Family f, Vector shift = {}, double scale = 1.0);

  static LogConcaveFn gaussian(const Eigen::MatrixXd& t, const Vector& shift = {}, double scale = 1.0);
  /// e^{-|x|^2} in dimension n.
  static LogConcaveFn standard_gaussian(int n);
  static LogConcaveFn indicator(const PolytopeV& k, double scale = 1.0);
  static LogConcaveFn ball_indicator(int n, double radius = 1.0);
  static LogConcaveFn exp_gauge(const PolytopeV& k, const Vector& shift = {}, double scale = 1.0);
  static LogConcaveFn product(std::vector<Factor1D> factors, const Vector& shift = {},
                              double scale = 1.0);

  int dim() const { return dim_; }
  double operator()(const Vector& x) const;
  /// -log f, +inf off the support.
  double potential(const Vector& x) const;
  double scale() const { return scale_; }
  const Vector& shift() const { return shift_; }
  const Family& family() const { return family_; }
  std::string kind() const;

  DecayBound decay() const;
  /// Characteristic length 1/c of the decay envelope.
  double length_scale() const { return 1.0 / decay().c; }
  /// r -> potential(z + r u), with per-ray coefficients precomputed.
  std::function<double(double)> ray_potential(const Vector& z, const Vector& u) const;
  /// Radii r > 0 along z + r u where f jumps or has a kink.
  std::vector<double> ray_breaks(const Vector& z, const Vector& u) const;
  /// sup of <x, w> over the support of f; +inf for full support.
  double support_extent(const Vector& w) const;
  /// A point near the bulk of f, used to start searches.
  Vector center_hint() const;

  LogConcaveFn scaled(double d) const;
  LogConcaveFn translated(const Vector& a) const;

 private:
  double family_potential(const Vector& y) const;

  Family family_;
  Vector shift_;
  double scale_ = 1.0;
  int dim_ = 0;
  std::vector<std::pair<Vector, double>> facets_;  // cached for polytope families
};

struct LogConcavityCheck {
  bool ok = true;
  double worst = 0.0;
};
/// Sampled midpoint test f(mid)^2 >= f(a) f(b) (1 - 1e-9).
LogConcavityCheck check_log_concave(const LogConcaveFn& f, std::uint64_t seed = 1,
                                    std::size_t pairs = 10000);

struct RadialOptions {
  double rel_tol = 1e-10;
  double tail_rel = 1e-12;  // certified tail / head
};

/// r_z(u) = (integral over r > 0 of r^{n-1} f(z + r u))^{1/n}.
double radial_moment(const LogConcaveFn& f, const Vector& z, const Vector& u,
                     const RadialOptions& opts = {});

/// Level body K_z with gauge (integral of r^{n-1} f(z + r x))^{-1/n}.
StarBody body_Kz(const LogConcaveFn& f, const Vector& z, int grid_size = 0,
                 const RadialOptions& opts = {});

/// Integral of f, computed as n |K_z| around a point z inside the support.
double integral(const LogConcaveFn& f, const Vector& z, int grid_size = 0);

struct CenteredPair {
  Vector z0;
  StarBody body;
  double centroid_residual = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  bool fallback = false;
};

struct CenterOptions {
  double tol_rel = 1e-6;  // relative to f's length scale
  int max_iter = 500;
  int grid_size = 0;
};

/// A point z0 at which K_{z0} has its centre of mass at the origin.
CenteredPair find_center(const LogConcaveFn& f, const CenterOptions& opts = {});

struct HypothesisOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double scale = 1.0;  // spread of the sampling distribution around z
  double slack = 1e-9;
};

/// Max over sampled pairs of f1(x) f2(y) / rho^2(<x - z, y - z>), restricted
/// to <x - z, y - z> > 0. Passes when the ratio stays below 1 + slack.
Report hypothesis_check(const Evaluator& f1, const Evaluator& f2, const RhoKernel& rho,
                        const Vector& z, const HypothesisOptions& opts = {});

/// g(y) = (1 - 1e-6) inf over x with <x - z, y - z> > 0 of rho^2(<x - z, y - z>) / f(x):
/// the largest g compatible with f under rho, up to optimizer slack.
class PolarFunction {
 public:
  PolarFunction(LogConcaveFn f, RhoKernel rho, Vector z);
  double operator()(const Vector& y) const;
  const Vector& center() const { return z_; }
  int dim() const { return f_.dim(); }
  /// Radius along z + r u past which g vanishes (+inf if never).
  double cutoff_radius(const Vector& u) const;
  Evaluator evaluator() const;

 private:
  double log_value(const Vector& w) const;

  LogConcaveFn f_;
  RhoKernel rho_;
  Vector z_;
  std::vector<Vector> dirs_;
  std::vector<std::function<double(double)>> rays_;  // potential along z + s dirs_[k]
  std::vector<double> radii_;
};

PolarFunction polar_function(const LogConcaveFn& f, const RhoKernel& rho, const Vector& z);

struct IntegrateOptions {
  int grid_size = 256;  // coarse sphere grid (n >= 2)
  double rel_tol = 1e-7;
};

/// Integral of a non-negative evaluator by polar coordinates around z.
/// `cutoff(u)` bounds the support along each ray when finite.
double integrate_around(const Evaluator& g, const Vector& z,
                        const std::function<double(const Vector&)>& cutoff,
                        const IntegrateOptions& opts = {});

struct FunctionalOptions {
  double tol = 1e-2;
  double equality_band = 1e-3;
  HypothesisOptions hypothesis{2000, 1, 1.0, 1e-9};
  CenterOptions center;
  IntegrateOptions g_integration;
};

/// Functional Santalo inequality: int f int g <= (int rho(|x|^2))^2 with z
/// supplied or found by find_center, and g supplied or taken as the polar function.
Report functional_santalo_verify(const LogConcaveFn& f, const RhoKernel& rho,
                                 const std::optional<Vector>& z = std::nullopt,
                                 const std::optional<Evaluator>& g = std::nullopt,
                                 const FunctionalOptions& opts = {});

/// Checks K_2 within c_n(rho) K_1° direction by direction, with K_j = K_0(f_j).
Report inclusion_check(const LogConcaveFn& f1, const Evaluator& f2, const RhoKernel& rho,
                       int grid_size = 0, double tol = 1e-6);

/// Evaluators on R_+^n for the geometric-mean Prekopa-Leindler check.
struct PrekopaOptions {
  std::size_t samples = 20000;
  std::uint64_t seed = 1;
  double sample_scale = 4.0;
  double tol = 1e-3;
  bool unconditional = false;
};

Report prekopa_geometric_check(int n, const Evaluator& f1, const Evaluator& f2, const Evaluator& f3,
                               const PrekopaOptions& opts = {});

/// Integral over R_+^n (n <= 3) by nested adaptive quadrature.
double integrate_orthant(int n, const Evaluator& f, double rel_tol = 1e-9);

/// Integral over R^n of f(e^{t_1}, ..., e^{t_n}) e^{t_1 + ... + t_n}.
double integrate_log_substituted(int n, const Evaluator& f, double rel_tol = 1e-9);

}  // namespace santalo
