#include "santalo/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "santalo/error.hpp"

namespace santalo {

double integrate(const ScalarFn& f, double a, double b, const QuadOptions& opts) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, opts.max_depth, opts.rel_tol, &err, &l1);
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::QuadFail, "non-finite integral on [" + std::to_string(a) + ", " +
                                         std::to_string(b) + "]");
  }
  if (err > opts.fail_rel * l1 + opts.abs_tol && err > 1e-300) {
    throw Error(ErrorCode::QuadFail, "error estimate " + std::to_string(err) +
                                         " exceeds tolerance on [" + std::to_string(a) + ", " +
                                         std::to_string(b) + "]");
  }
  return value;
}

double integrate_pieces(const ScalarFn& f, std::span<const double> breaks,
                        const QuadOptions& opts) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (b - a <= 1e-13 * std::max(std::abs(a), std::abs(b))) continue;
    total += integrate(f, a, b, opts);
  }
  return total;
}

FixedRule gauss_legendre(int order, double a, double b) {
  // Golub-Welsch would be overkill; Newton on P_n is accurate to ~1e-15 for n <= 200.
  FixedRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[order - 1 - i] = half * w;
  }
  return rule;
}

}  // namespace santalo
