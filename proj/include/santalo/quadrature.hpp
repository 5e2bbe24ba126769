#pragma once

#include <functional>
#include <span>
#include <vector>

namespace santalo {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  unsigned max_depth = 18;
  /// Error estimate beyond which QuadFail is raised (relative to the L1 norm).
  double fail_rel = 1e-6;
};

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod integral of f over [a, b].
double integrate(const ScalarFn& f, double a, double b, const QuadOptions& opts = {});

/// Integral over [breaks.front(), breaks.back()], split at every interior break.
double integrate_pieces(const ScalarFn& f, std::span<const double> breaks,
                        const QuadOptions& opts = {});

/// Gauss-Legendre nodes and weights mapped onto [a, b].
struct FixedRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
FixedRule gauss_legendre(int order, double a, double b);

}  // namespace santalo
