#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "santalo/report.hpp"

namespace santalo {

struct FuzzOptions {
  std::size_t count = 100;
  std::uint64_t seed = 1;
  double tol = 1e-2;  // a case violates when its relative margin is below -tol
  unsigned threads = 0;  // 0: hardware concurrency
  int grid_size = 0;
  int shrink_steps = 40;
};

/// symmetric-polytopes, convex-bodies, logconcave-functions, convex-gridfns,
/// rho-kernels, measure-pairs; "polygons" and "symmetric-polygons" restrict
/// the first family to the plane.
std::vector<std::string> fuzz_families();

/// Every case is a perturbation vector applied to a canonical instance of
/// the family. Violations are shrunk by halving the perturbation while the
/// violation persists; the smallest one found is reported.
Report fuzz(const std::string& family, const FuzzOptions& opts = {});

}  // namespace santalo
