#include "santalo/polar.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "santalo/error.hpp"
#include "santalo/geometry.hpp"
#include "santalo/hull.hpp"
#include "santalo/optimize.hpp"
#include "santalo/symmetrization.hpp"

namespace santalo {

namespace {

std::vector<Vector> sample_points(const StarBody& s) {
  std::vector<Vector> pts;
  pts.reserve(s.grid().size() + s.extreme_points().size());
  for (std::size_t i = 0; i < s.grid().size(); ++i) pts.push_back(s.boundary_point(i));
  for (const auto& p : s.extreme_points()) pts.push_back(p);
  return pts;
}

StarBody polar_star(const std::vector<Vector>& pts, const Vector& z, int grid_size) {
  auto grid = SphereGrid::make(static_cast<int>(z.size()), grid_size);
  auto h = support_on_grid(pts, z, *grid);
  double hmax = 0.0;
  for (double v : h) hmax = std::max(hmax, v);
  std::vector<double> r(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    require(h[i] > 1e-12 * hmax, ErrorCode::CenterOutside, "center is not interior to the body");
    r[i] = 1.0 / h[i];
  }
  return StarBody(grid, std::move(r));
}

struct PolarMoments {
  double m0 = 0.0;
  Vector m1;
  Eigen::MatrixXd m2;
};

// z -> moments of (K - z)°, either exact (polytope, triangulation reused
// across z since the face lattice does not change) or on a sphere grid.
class PolarModel {
 public:
  virtual ~PolarModel() = default;
  virtual std::optional<PolarMoments> moments(const Vector& z) const = 0;
  virtual double polar_volume(const Vector& z) const = 0;
};

class PolytopeModel final : public PolarModel {
 public:
  PolytopeModel(const PolytopeV& k, const Vector& z0) {
    for (const auto& f : hull_facets(k.vertices())) {
      normals_.push_back(f.normal);
      offsets_.push_back(f.offset);
    }
    auto pts = polar_points(z0);
    require(pts.has_value(), ErrorCode::CenterOutside, "start point is not interior to the body");
    simplices_ = triangulate(*pts);
  }

  std::optional<PolarMoments> moments(const Vector& z) const override {
    auto pts = polar_points(z);
    if (!pts) return std::nullopt;
    const auto m = simplex_moments(*pts, simplices_);
    return PolarMoments{m.volume, m.first, m.second};
  }

  double polar_volume(const Vector& z) const override {
    auto pts = polar_points(z);
    if (!pts) return std::numeric_limits<double>::infinity();
    return simplex_moments(*pts, simplices_).volume;
  }

 private:
  std::optional<std::vector<Vector>> polar_points(const Vector& z) const {
    std::vector<Vector> pts;
    pts.reserve(normals_.size());
    for (std::size_t i = 0; i < normals_.size(); ++i) {
      const double d = offsets_[i] - normals_[i].dot(z);
      if (!(d > 1e-12 * (1.0 + std::abs(offsets_[i])))) return std::nullopt;
      pts.push_back(normals_[i] / d);
    }
    return pts;
  }

  std::vector<Vector> normals_;
  std::vector<double> offsets_;
  std::vector<Simplex> simplices_;
};

// On a grid, h_{K-z}(u) = h_K(u) - <z, u> exactly, so the discrete polar
// volume is a smooth convex function of z and Newton converges cleanly.
class GridModel final : public PolarModel {
 public:
  GridModel(const std::vector<Vector>& pts, int dim, int grid_size)
      : grid_(SphereGrid::make(dim, grid_size)) {
    const auto h = support_on_grid(pts, Vector::Zero(dim), *grid_);
    h0_ = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
  }

  std::optional<PolarMoments> moments(const Vector& z) const override {
    const int n = grid_->dim();
    const Eigen::VectorXd d = h0_ - grid_->nodes().transpose() * z;
    if (!(d.minCoeff() > 1e-12 * h0_.maxCoeff())) return std::nullopt;
    const Eigen::ArrayXd rho = d.array().inverse();
    const Eigen::ArrayXd rn = rho.pow(n);
    const double c = ball_volume(n) * grid_->weight();
    PolarMoments m;
    m.m0 = c * rn.sum();
    m.m1 = c * n / (n + 1.0) * (grid_->nodes() * (rn * rho).matrix());
    const Eigen::ArrayXd w2 = rn * rho * rho;
    m.m2 = c * n / (n + 2.0) *
           (grid_->nodes() * w2.matrix().asDiagonal() * grid_->nodes().transpose());
    return m;
  }

  double polar_volume(const Vector& z) const override {
    const Eigen::VectorXd d = h0_ - grid_->nodes().transpose() * z;
    if (!(d.minCoeff() > 1e-12 * h0_.maxCoeff())) return std::numeric_limits<double>::infinity();
    return ball_volume(grid_->dim()) * grid_->weight() * d.array().inverse().pow(grid_->dim()).sum();
  }

 private:
  GridPtr grid_;
  Eigen::VectorXd h0_;
};

std::unique_ptr<PolarModel> make_model(const ConvexBody& k, const Vector& z0, int grid_size) {
  if (const auto* p = std::get_if<PolytopeV>(&k)) {
    if (p->dim() <= 4) return std::make_unique<PolytopeModel>(*p, z0);
    return std::make_unique<GridModel>(p->vertices(), p->dim(), grid_size);
  }
  const auto& s = std::get<StarBody>(k);
  return std::make_unique<GridModel>(sample_points(s), s.dim(), s.grid().size());
}

}  // namespace

PolarResult polar_wrt(const ConvexBody& k, const Vector& z, int grid_size) {
  const int n = dim(k);
  require(z.size() == n, ErrorCode::InvalidInput, "center dimension mismatch");
  if (const auto* p = std::get_if<PolytopeV>(&k)) {
    if (n <= 4) {
      std::vector<Vector> verts;
      for (const auto& f : hull_facets(p->vertices())) {
        const double d = f.offset - f.normal.dot(z);
        require(d > 1e-12 * (1.0 + std::abs(f.offset)), ErrorCode::CenterOutside,
                "center is not interior to the polytope");
        verts.push_back(f.normal / d);
      }
      PolytopeV body(std::move(verts));
      const double vol = volume_polytope(body);
      return {std::move(body), z, vol};
    }
    auto body = polar_star(p->vertices(), z, grid_size);
    const double vol = volume_star(body);
    return {std::move(body), z, vol};
  }
  const auto& s = std::get<StarBody>(k);
  auto body = polar_star(sample_points(s), z, static_cast<int>(s.grid().size()));
  const double vol = volume_star(body);
  return {std::move(body), z, vol};
}

double volume_product(const ConvexBody& k, const Vector& z, int grid_size) {
  return volume(k) * polar_wrt(k, z, grid_size).volume;
}

SantaloResult solve_santalo(const ConvexBody& k, const SantaloOptions& opts) {
  const int n = dim(k);
  const double diam = diameter(k);
  require(diam > 0.0, ErrorCode::DegenerateBody, "zero-diameter body");
  SantaloResult out;
  out.tolerance = opts.tol_rel * diam;
  out.body_volume = volume(k);

  Vector z = centroid(k);
  const auto model = make_model(k, z, opts.grid_size);
  auto m = model->moments(z);
  require(m.has_value(), ErrorCode::CenterOutside, "centroid is not interior to the body");

  auto residual = [](const PolarMoments& pm) { return pm.m1.norm() / pm.m0; };
  double res = residual(*m);
  for (int it = 0; it < opts.max_iter && res > 1e-3 * out.tolerance; ++it) {
    out.iterations = it + 1;
    const Vector step = -m->m2.ldlt().solve(m->m1) / (n + 2.0);
    bool moved = false;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      const Vector zt = z + t * step;
      auto mt = model->moments(zt);
      if (mt && mt->m0 <= m->m0 * (1.0 + 1e-14)) {
        z = zt;
        m = mt;
        moved = true;
        break;
      }
    }
    const double next = residual(*m);
    if (!moved || next >= res) {
      res = next;
      break;
    }
    res = next;
  }

  if (res > out.tolerance) {
    out.fallback = true;
    NelderMeadOptions nm;
    nm.initial_step = 0.05 * diam;
    nm.xtol = 1e-14;
    nm.max_evals = 20000;
    auto best = nelder_mead([&](const Vector& x) { return model->polar_volume(x); }, z, nm);
    auto mb = model->moments(best.x);
    if (mb && residual(*mb) < res) {
      z = best.x;
      m = mb;
      res = residual(*mb);
    }
    if (res > out.tolerance) throw SolverError("Santalo point did not converge", z, res);
  }

  out.point = z;
  out.residual = res;
  out.polar_volume = m->m0;
  out.product = out.body_volume * out.polar_volume;

  const double delta = opts.probe_rel * diam;
  out.probes_ok = true;
  for (int i = 0; i < n; ++i) {
    for (double sgn : {-1.0, 1.0}) {
      Vector probe = z;
      probe(i) += sgn * delta;
      if (model->polar_volume(probe) < out.polar_volume * (1.0 - 1e-12)) out.probes_ok = false;
    }
  }
  return out;
}

Vector santalo_point(const ConvexBody& k, const SantaloOptions& opts) {
  return solve_santalo(k, opts).point;
}

Report bs_check(const ConvexBody& k, const BsOptions& opts) {
  Report r("bs-check");
  const int n = dim(k);
  const auto s = solve_santalo(k, opts.santalo);
  const double bound = std::pow(ball_volume(n), 2);
  r.set("dim", n);
  r.set("volume", s.body_volume);
  r.set("polar_volume", s.polar_volume);
  r.set("volume_product", s.product);
  r.set("bound", bound);
  r.set("margin", relative_margin(s.product, bound));
  r.set("santalo_residual", s.residual);
  r.set("santalo_iterations", s.iterations);
  r.note("santalo_point", std::vector<double>(s.point.data(), s.point.data() + s.point.size()));
  r.check_le("volume product <= v_n^2", "BS-ineq", s.product, bound, opts.tol);
  r.check_le_abs("santalo fixed point", "Santalo-point", s.residual, 0.0, s.tolerance);
  r.check_true("santalo probes", "Santalo-point", s.probes_ok);
  if (s.fallback) r.warn("santalo solver used the derivative-free fallback");

  const bool candidate = std::abs(relative_margin(s.product, bound)) < opts.equality_band;
  r.note("ellipsoid_candidate", candidate);
  if (candidate) {
    const auto e = ellipsoid_test(k);
    r.set("ellipsoid_defect", e.defect);
    r.check_true("near-equality body is an ellipsoid", "BS-ineq", e.is_ellipsoid);
  }
  return r;
}

}  // namespace santalo
