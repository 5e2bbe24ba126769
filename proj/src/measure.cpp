#include "santalo/measure.hpp"

#include <algorithm>
#include <cmath>

#include "santalo/error.hpp"
#include "santalo/geometry.hpp"
#include "santalo/hull.hpp"
#include "santalo/polar.hpp"
#include "santalo/quadrature.hpp"
#include "santalo/rng.hpp"

namespace santalo {

DensityMeasure DensityMeasure::unconditional(int dim, std::function<double(const Vector&)> potential,
                                             std::string label) {
  require(dim >= 1, ErrorCode::InvalidInput, "dimension must be positive");
  DensityMeasure m;
  m.kind_ = Kind::UnconditionalLogConcave;
  m.dim_ = dim;
  m.label_ = std::move(label);
  m.potential_ = std::move(potential);
  return m;
}

DensityMeasure DensityMeasure::rotation_invariant(int dim, std::function<double(double)> profile,
                                                  std::vector<double> breaks, std::string label) {
  require(dim >= 1, ErrorCode::InvalidInput, "dimension must be positive");
  DensityMeasure m;
  m.kind_ = Kind::RotationInvariant;
  m.dim_ = dim;
  m.label_ = std::move(label);
  m.profile_ = std::move(profile);
  std::sort(breaks.begin(), breaks.end());
  m.breaks_ = std::move(breaks);
  return m;
}

DensityMeasure DensityMeasure::gaussian(int dim) {
  return unconditional(dim, [](const Vector& x) { return 0.5 * x.squaredNorm(); }, "gaussian");
}

DensityMeasure DensityMeasure::gaussian_radial(int dim) {
  return rotation_invariant(dim, [](double t) { return std::exp(-0.5 * t * t); }, {}, "gaussian");
}

DensityMeasure DensityMeasure::truncated_lebesgue(int dim, double radius) {
  require(radius > 0.0, ErrorCode::InvalidInput, "radius must be positive");
  return rotation_invariant(dim, [radius](double t) { return t <= radius ? 1.0 : 0.0; }, {radius},
                            "truncated-lebesgue");
}

double DensityMeasure::density(const Vector& x) const {
  if (kind_ == Kind::UnconditionalLogConcave) return std::exp(-potential_(x));
  return profile_(x.norm());
}

StructureCheck DensityMeasure::verify(std::uint64_t seed, std::size_t pairs) const {
  StructureCheck out;
  auto fail = [&](const char* what, double worst) {
    if (out.ok) {
      out.ok = false;
      out.failed = what;
    }
    out.worst = std::max(out.worst, worst);
  };
  CounterRng rng(seed, 0x6d65);
  if (kind_ == Kind::UnconditionalLogConcave) {
    RngCursor cur(rng.substream(1));
    for (std::size_t i = 0; i < pairs; ++i) {
      Vector a(dim_), b(dim_);
      for (int j = 0; j < dim_; ++j) {
        a(j) = 2.0 * cur.normal();
        b(j) = 2.0 * cur.normal();
      }
      const double fa = density(a), fb = density(b), fm = density(0.5 * (a + b));
      if (fm * fm < fa * fb * (1.0 - 1e-9)) fail("log-concavity", fa * fb - fm * fm);
      Vector flipped = a;
      for (int j = 0; j < dim_; ++j) {
        if (cur.bits() & 1u) flipped(j) = -flipped(j);
      }
      const double ff = density(flipped);
      if (std::abs(ff - fa) > 1e-12 * std::max(std::abs(fa), 1e-300)) {
        fail("unconditionality", std::abs(ff - fa));
      }
    }
    return out;
  }
  RngCursor cur(rng.substream(2));
  for (std::size_t i = 0; i < pairs; ++i) {
    const double s1 = cur.uniform(-6.0, 3.0), s2 = cur.uniform(-6.0, 3.0);
    const double h1 = profile_(std::exp(s1)), h2 = profile_(std::exp(s2));
    if (!(h1 >= 0.0) || !(h2 >= 0.0)) fail("non-negativity", 0.0);
    const double lo = std::min(s1, s2), hi = std::max(s1, s2);
    if (profile_(std::exp(hi)) > profile_(std::exp(lo)) * (1.0 + 1e-12)) {
      fail("monotonicity", profile_(std::exp(hi)) - profile_(std::exp(lo)));
    }
    const double hm = profile_(std::exp(0.5 * (s1 + s2)));
    if (hm * hm < h1 * h2 * (1.0 - 1e-9)) fail("log-concavity of h(e^t)", h1 * h2 - hm * hm);
  }
  return out;
}

namespace {

double quadrature_measure(const DensityMeasure& mu, const StarBody& s) {
  const int n = s.dim();
  QuadOptions q;
  q.rel_tol = 1e-10;
  q.abs_tol = 1e-300;
  double sum = 0.0;
  std::vector<double> pts;
  for (std::size_t i = 0; i < s.grid().size(); ++i) {
    const Vector u = s.grid().node(i);
    const double r = s.radial(i);
    pts.assign({0.0});
    for (double b : mu.breaks()) {
      if (b > 0.0 && b < r) pts.push_back(b);
    }
    pts.push_back(r);
    sum += integrate_pieces([&](double t) { return mu.density(t * u) * std::pow(t, n - 1); }, pts, q);
  }
  return n * ball_volume(n) * s.grid().weight() * sum;
}

double monte_carlo_measure(const DensityMeasure& mu, const ConvexBody& k, const MeasureOptions& o) {
  const int n = dim(k);
  std::function<bool(const Vector&)> inside;
  double radius = 0.0;
  if (const auto* p = std::get_if<PolytopeV>(&k)) {
    auto facets = hull_facets(p->vertices());
    inside = [facets](const Vector& x) {
      for (const auto& f : facets) {
        if (f.normal.dot(x) > f.offset) return false;
      }
      return true;
    };
    for (const auto& v : p->vertices()) radius = std::max(radius, v.norm());
  } else {
    const auto& s = std::get<StarBody>(k);
    inside = [&s](const Vector& x) { return gauge(s, x) <= 1.0; };
    for (double r : s.radial()) radius = std::max(radius, r);
  }
  CounterRng rng(o.seed, 0x6d63);
  double acc = 0.0;
  Vector x(n);
  for (std::size_t i = 0; i < o.samples; ++i) {
    for (int j = 0; j < n; ++j) x(j) = rng.uniform(i * n + j, -radius, radius);
    if (inside(x)) acc += mu.density(x);
  }
  return std::pow(2.0 * radius, n) * acc / static_cast<double>(o.samples);
}

}  // namespace

double measure_of(const DensityMeasure& mu, const ConvexBody& k, const MeasureOptions& opts) {
  require(dim(k) == mu.dim(), ErrorCode::InvalidInput, "measure and body dimensions differ");
  if (opts.method == MeasureOptions::Method::MonteCarlo) return monte_carlo_measure(mu, k, opts);
  if (const auto* s = std::get_if<StarBody>(&k)) return quadrature_measure(mu, *s);
  return quadrature_measure(mu, to_star(k, opts.grid_size));
}

Report measure_product_check(const DensityMeasure& mu, const ConvexBody& k,
                             const MeasureOptions& opts) {
  const int n = dim(k);
  const bool unconditional = mu.kind() == DensityMeasure::Kind::UnconditionalLogConcave;
  const std::string tag = unconditional ? "Cor2.2" : "Cor3.2";
  if (unconditional) {
    require(is_unconditional(k), ErrorCode::HypothesisFail, "body is not unconditional");
  } else {
    require(is_centrally_symmetric(k), ErrorCode::HypothesisFail, "body is not centrally symmetric");
  }
  const auto structure = mu.verify(opts.seed);
  require(structure.ok, ErrorCode::HypothesisFail, "measure fails " + structure.failed + " check");

  const int gsize = std::holds_alternative<StarBody>(k)
                        ? static_cast<int>(std::get<StarBody>(k).grid().size())
                        : opts.grid_size;
  const auto polar = polar_wrt(k, Vector::Zero(n), gsize);
  const double mk = measure_of(mu, k, opts);
  const double mp = measure_of(mu, polar.body, opts);
  const double mb = measure_of(mu, ConvexBody(make_ball(n, 1.0, gsize)), opts);

  Report r("measure-check");
  r.seed("seed", opts.seed);
  r.set("dim", n);
  r.set("mu_K", mk);
  r.set("mu_polar", mp);
  r.set("mu_ball", mb);
  r.set("product", mk * mp);
  r.set("bound", mb * mb);
  r.set("margin", relative_margin(mk * mp, mb * mb));
  r.note("measure", mu.label());
  r.note("method", opts.method == MeasureOptions::Method::Quadrature ? "quadrature" : "monte-carlo");
  r.check_le("mu(K) mu(K polar) <= mu(B)^2", tag, mk * mp, mb * mb, opts.tol);
  return r;
}

}  // namespace santalo
