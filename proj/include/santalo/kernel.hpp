#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace santalo {

/// Profile rho: R -> R_+. The defining families live on R_+; each is
/// extended to negative arguments without breaking monotonicity or
/// log-concavity, since Legendre transforms can be negative.
class RhoKernel {
 public:
  enum class Family { Exp, Power, Indicator, Piecewise };

  static RhoKernel exp();                   // e^{-t}
  static RhoKernel power(double m);         // (1 - t)_+^m
  static RhoKernel indicator();             // 1 on t <= 1, else 0
  /// Piecewise log-linear through (knots[i], log_values[i]); slopes of the
  /// outer pieces extend beyond the ends. With `cutoff`, rho vanishes past
  /// the last knot.
  static RhoKernel piecewise(std::vector<double> knots, std::vector<double> log_values,
                             bool cutoff = false);

  double operator()(double t) const;
  /// log rho(t), -inf where rho vanishes.
  double log(double t) const;
  /// Derivative; one-sided from the right at kinks.
  double derivative(double t) const;

  Family family() const { return family_; }
  const std::string& name() const { return name_; }
  double exponent() const { return m_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& log_values() const { return logs_; }
  bool cutoff() const { return cutoff_; }

  bool log_concave() const { return log_concave_; }
  bool non_increasing() const { return non_increasing_; }
  bool geometric_mean_dominant() const { return gm_dominant_; }
  bool strictly_convex() const { return strictly_convex_; }
  /// rho < 1e-16 beyond this argument.
  double support_hint() const { return support_hint_; }
  /// Smallest t with rho = 0 on [t, inf); +inf when rho never vanishes.
  double zero_from() const { return zero_from_; }
  /// Points where rho is not smooth.
  std::vector<double> breaks() const;

  struct FlagCheck {
    bool ok = true;
    std::string failed;
  };
  /// Sampled verification of the declared flags (10^4 pairs, slack 1e-9).
  FlagCheck verify(std::uint64_t seed = 1, std::size_t pairs = 10000) const;

 private:
  Family family_ = Family::Exp;
  std::string name_;
  double m_ = 1.0;
  std::vector<double> knots_;
  std::vector<double> logs_;
  bool cutoff_ = false;
  bool log_concave_ = true;
  bool non_increasing_ = true;
  bool gm_dominant_ = true;
  bool strictly_convex_ = false;
  double support_hint_ = std::numeric_limits<double>::infinity();
  double zero_from_ = std::numeric_limits<double>::infinity();
};

/// c_n(rho) together with the full-space integral of rho(|x|^2),
/// which equals n v_n c_n(rho)^{n/2}.
struct KernelConstant {
  double c_n = 0.0;
  double radial_integral = 0.0;  // integral of r^{n-1} rho(r^2) over R_+
  double full_integral = 0.0;
};

KernelConstant c_n_rho(const RhoKernel& rho, int n);

}  // namespace santalo
