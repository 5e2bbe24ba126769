#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace santalo {

enum class ErrorCode {
  DegenerateBody,
  CenterOutside,
  SolverFail,
  HypothesisFail,
  DivergentKernel,
  QuadFail,
  EmptyDomain,
  InvalidInput,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by iterative solvers; carries the best iterate seen.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, Eigen::VectorXd best, double residual)
      : Error(ErrorCode::SolverFail, what), best_(std::move(best)), residual_(residual) {}

  const Eigen::VectorXd& best() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace santalo
