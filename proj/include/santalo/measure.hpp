#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "santalo/body.hpp"
#include "santalo/report.hpp"

namespace santalo {

struct StructureCheck {
  bool ok = true;
  std::string failed;  // name of the first failing check
  double worst = 0.0;
};

/// Measure with a density, in one of two structural classes:
/// e^{-W} with W convex and unconditional, or h(|x|) with h non-increasing
/// and t -> h(e^t) log-concave.
class DensityMeasure {
 public:
  enum class Kind { UnconditionalLogConcave, RotationInvariant };

  static DensityMeasure unconditional(int dim, std::function<double(const Vector&)> potential,
                                      std::string label = "custom");
  /// `breaks` lists radii where h is not smooth, for quadrature.
  static DensityMeasure rotation_invariant(int dim, std::function<double(double)> profile,
                                           std::vector<double> breaks = {},
                                           std::string label = "custom");
  /// e^{-|x|^2/2}, as the unconditional potential |x|^2/2.
  static DensityMeasure gaussian(int dim);
  /// e^{-|x|^2/2}, as the radial profile e^{-t^2/2}.
  static DensityMeasure gaussian_radial(int dim);
  /// Lebesgue measure restricted to the ball of radius R.
  static DensityMeasure truncated_lebesgue(int dim, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  double density(const Vector& x) const;
  const std::vector<double>& breaks() const { return breaks_; }

  /// Sampled structural checks; log-concavity uses 10^4 midpoint pairs by default.
  StructureCheck verify(std::uint64_t seed = 1, std::size_t pairs = 10000) const;

 private:
  Kind kind_ = Kind::UnconditionalLogConcave;
  int dim_ = 0;
  std::string label_;
  std::function<double(const Vector&)> potential_;
  std::function<double(double)> profile_;
  std::vector<double> breaks_;
};

struct MeasureOptions {
  enum class Method { Quadrature, MonteCarlo };
  Method method = Method::Quadrature;
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;
  int grid_size = 0;
  double tol = 1e-3;
};

/// mu(K) for K containing the origin in its interior.
double measure_of(const DensityMeasure& mu, const ConvexBody& k, const MeasureOptions& opts = {});

Report measure_product_check(const DensityMeasure& mu, const ConvexBody& k,
                             const MeasureOptions& opts = {});

}  // namespace santalo
