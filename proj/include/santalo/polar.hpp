#pragma once

#include "santalo/body.hpp"
#include "santalo/report.hpp"

namespace santalo {

/// Polar of K with respect to `center`. `body` is (K - center)°, i.e. the
/// polar expressed in coordinates centred at `center`; K^{*z} = center + body.
struct PolarResult {
  ConvexBody body;
  Vector center;
  double volume = 0.0;
};

/// Polytopes up to n = 4 get an exact polar polytope; otherwise the polar
/// is a StarBody with r(u) = 1 / h_{K - z}(u) on a sphere grid.
PolarResult polar_wrt(const ConvexBody& k, const Vector& z, int grid_size = 0);

/// |K| * |K^{*z}|.
double volume_product(const ConvexBody& k, const Vector& z, int grid_size = 0);

struct SantaloOptions {
  double tol_rel = 1e-6;    // residual tolerance as a fraction of diam(K)
  int max_iter = 100;
  double probe_rel = 1e-3;  // probe offset as a fraction of diam(K)
  int grid_size = 0;
};

struct SantaloResult {
  Vector point;
  double residual = 0.0;   // |centroid(K^{*z}) - z|
  double tolerance = 0.0;
  double body_volume = 0.0;
  double polar_volume = 0.0;
  double product = 0.0;
  int iterations = 0;
  bool fallback = false;   // Nelder-Mead was needed
  bool probes_ok = false;  // no probe z +- delta e_i beat z
};

/// Minimizer of z -> |K^{*z}|, found by Newton's method on the polar
/// moments. The iterate is accepted once the polar centroid coincides with z.
SantaloResult solve_santalo(const ConvexBody& k, const SantaloOptions& opts = {});
Vector santalo_point(const ConvexBody& k, const SantaloOptions& opts = {});

struct BsOptions {
  SantaloOptions santalo;
  double tol = 1e-3;             // slack on |K||K^{*s}| <= v_n^2
  double equality_band = 1e-3;   // |margin| below this flags an ellipsoid candidate
};

Report bs_check(const ConvexBody& k, const BsOptions& opts = {});

}  // namespace santalo
