#pragma once

#include <functional>

#include <Eigen/Dense>

namespace santalo {

struct NelderMeadOptions {
  double initial_step = 0.1;
  double ftol = 1e-14;
  double xtol = 1e-12;
  int max_evals = 4000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization. Non-finite objective values are
/// treated as +infinity, which lets callers encode constraints.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& start, const NelderMeadOptions& opts = {});

/// Golden-section minimization of a unimodal function on [a, b].
double golden_section(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-12, int max_iter = 200);

}  // namespace santalo
