#include "santalo/logconcave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "santalo/error.hpp"
#include "santalo/geometry.hpp"
#include "santalo/hull.hpp"
#include "santalo/optimize.hpp"
#include "santalo/quadrature.hpp"
#include "santalo/rng.hpp"

namespace santalo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double sigma_min(const Eigen::MatrixXd& t) { return t.jacobiSvd().singularValues().minCoeff(); }
double sigma_max(const Eigen::MatrixXd& t) { return t.jacobiSvd().singularValues().maxCoeff(); }

std::vector<double> as_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Integral of f over [a, b] where the result only has to be accurate relative
// to `total`: a fixed rule settles negligible pieces, the rest go adaptive.
double tail_piece(const ScalarFn& f, double a, double b, double total, const QuadOptions& q) {
  static const FixedRule unit = gauss_legendre(20, 0.0, 1.0);
  double est = 0.0;
  for (std::size_t i = 0; i < unit.nodes.size(); ++i) est += unit.weights[i] * f(a + (b - a) * unit.nodes[i]);
  est *= (b - a);
  if (std::abs(est) <= 1e-6 * std::abs(total)) return est;
  return integrate(f, a, b, q);
}

}  // namespace

// ---------------------------------------------------------------- Factor1D

double Factor1D::potential(double x) const {
  switch (kind) {
    case Kind::Gaussian:
      return p * (x - q) * (x - q);
    case Kind::Laplace:
      return p * std::abs(x - q);
    case Kind::OneSided:
      return x >= q ? p * (x - q) : kInf;
    case Kind::Uniform:
      return (x >= p && x <= q) ? 0.0 : kInf;
  }
  return kInf;
}

DecayBound Factor1D::decay() const {
  switch (kind) {
    case Kind::Gaussian:
      return {std::exp(-1.0), 1.0 / std::sqrt(p), std::sqrt(p),
              std::exp(0.25 + std::sqrt(p) * std::abs(q))};
    case Kind::Laplace:
      return {std::exp(-1.0), 1.0 / p, p, std::exp(p * std::abs(q))};
    case Kind::OneSided:
      return {std::exp(-1.0), 0.0, p, std::exp(2.0 * p * std::abs(q))};
    case Kind::Uniform: {
      const double r = std::max({std::abs(p), std::abs(q), 1e-300});
      return {1.0, 0.0, 1.0 / r, std::exp(1.0)};
    }
  }
  return {};
}

std::vector<double> Factor1D::kinks() const {
  switch (kind) {
    case Kind::Gaussian:
      return {};
    case Kind::Laplace:
    case Kind::OneSided:
      return {q};
    case Kind::Uniform:
      return {p, q};
  }
  return {};
}

double Factor1D::median() const {
  switch (kind) {
    case Kind::Gaussian:
    case Kind::Laplace:
      return q;
    case Kind::OneSided:
      return q + std::log(2.0) / p;
    case Kind::Uniform:
      return 0.5 * (p + q);
  }
  return 0.0;
}

// ------------------------------------------------------------ LogConcaveFn

LogConcaveFn::LogConcaveFn(Family f, Vector shift, double scale)
    : family_(std::move(f)), shift_(std::move(shift)), scale_(scale) {
  require(scale > 0.0 && std::isfinite(scale), ErrorCode::InvalidInput, "scale must be positive");
  dim_ = std::visit(overloaded{
                        [](const family::Gaussian& g) { return static_cast<int>(g.t.cols()); },
                        [](const family::PolytopeIndicator& p) { return p.body.dim(); },
                        [](const family::EllipsoidIndicator& e) { return static_cast<int>(e.t.cols()); },
                        [](const family::ExpGauge& e) { return e.body.dim(); },
                        [](const family::Product& p) { return static_cast<int>(p.factors.size()); },
                        [](const family::Custom& c) { return c.dim; },
                    },
                    family_);
  require(dim_ >= 1, ErrorCode::InvalidInput, "dimension must be positive");
  if (shift_.size() == 0) shift_ = Vector::Zero(dim_);
  require(shift_.size() == dim_, ErrorCode::InvalidInput, "shift dimension mismatch");

  if (const auto* g = std::get_if<family::Gaussian>(&family_)) {
    require(g->t.rows() == g->t.cols() && sigma_min(g->t) > 1e-12, ErrorCode::InvalidInput,
            "gaussian matrix must be square and invertible");
  }
  if (const auto* e = std::get_if<family::EllipsoidIndicator>(&family_)) {
    require(e->t.rows() == e->t.cols() && sigma_min(e->t) > 1e-12, ErrorCode::InvalidInput,
            "ellipsoid matrix must be square and invertible");
  }
  auto cache_facets = [this](const PolytopeV& p) {
    for (const auto& f : hull_facets(p.vertices())) facets_.emplace_back(f.normal, f.offset);
  };
  if (const auto* p = std::get_if<family::PolytopeIndicator>(&family_)) cache_facets(p->body);
  if (const auto* p = std::get_if<family::ExpGauge>(&family_)) {
    cache_facets(p->body);
    for (const auto& [a, b] : facets_) {
      require(b > 1e-12, ErrorCode::CenterOutside, "gauge body must contain the origin in its interior");
    }
  }
  if (const auto* p = std::get_if<family::Product>(&family_)) {
    for (const auto& f : p->factors) {
      const bool ok = f.kind == Factor1D::Kind::Uniform ? f.q > f.p : f.p > 0.0;
      require(ok, ErrorCode::InvalidInput, "invalid product factor parameters");
    }
  }
  if (const auto* c = std::get_if<family::Custom>(&family_)) {
    require(static_cast<bool>(c->potential), ErrorCode::InvalidInput, "custom family needs a potential");
    require(c->decay.c > 0.0 && c->decay.d > 0.0, ErrorCode::InvalidInput, "custom family needs a decay bound");
  }
}

LogConcaveFn LogConcaveFn::gaussian(const Eigen::MatrixXd& t, const Vector& shift, double scale) {
  return LogConcaveFn(family::Gaussian{t}, shift, scale);
}

LogConcaveFn LogConcaveFn::standard_gaussian(int n) {
  return gaussian(Eigen::MatrixXd::Identity(n, n));
}

LogConcaveFn LogConcaveFn::indicator(const PolytopeV& k, double scale) {
  return LogConcaveFn(family::PolytopeIndicator{k}, {}, scale);
}

LogConcaveFn LogConcaveFn::ball_indicator(int n, double radius) {
  return LogConcaveFn(family::EllipsoidIndicator{radius * Eigen::MatrixXd::Identity(n, n)});
}

LogConcaveFn LogConcaveFn::exp_gauge(const PolytopeV& k, const Vector& shift, double scale) {
  return LogConcaveFn(family::ExpGauge{k}, shift, scale);
}

LogConcaveFn LogConcaveFn::product(std::vector<Factor1D> factors, const Vector& shift, double scale) {
  return LogConcaveFn(family::Product{std::move(factors)}, shift, scale);
}

std::string LogConcaveFn::kind() const {
  return std::visit(overloaded{
                        [](const family::Gaussian&) { return std::string("gaussian"); },
                        [](const family::PolytopeIndicator&) { return std::string("indicator"); },
                        [](const family::EllipsoidIndicator&) { return std::string("ellipsoid-indicator"); },
                        [](const family::ExpGauge&) { return std::string("exp-gauge"); },
                        [](const family::Product&) { return std::string("product"); },
                        [](const family::Custom& c) { return c.label.empty() ? std::string("custom") : c.label; },
                    },
                    family_);
}

double LogConcaveFn::family_potential(const Vector& y) const {
  return std::visit(
      overloaded{
          [&](const family::Gaussian& g) { return (g.t * y).squaredNorm(); },
          [&](const family::PolytopeIndicator&) {
            for (const auto& [a, b] : facets_) {
              if (a.dot(y) > b + 1e-14 * (1.0 + std::abs(b))) return kInf;
            }
            return 0.0;
          },
          [&](const family::EllipsoidIndicator& e) {
            return e.t.partialPivLu().solve(y).squaredNorm() <= 1.0 ? 0.0 : kInf;
          },
          [&](const family::ExpGauge&) {
            double g = 0.0;
            for (const auto& [a, b] : facets_) g = std::max(g, a.dot(y) / b);
            return g;
          },
          [&](const family::Product& p) {
            double s = 0.0;
            for (std::size_t i = 0; i < p.factors.size(); ++i) {
              s += p.factors[i].potential(y(static_cast<Eigen::Index>(i)));
            }
            return s;
          },
          [&](const family::Custom& c) { return c.potential(y); },
      },
      family_);
}

double LogConcaveFn::potential(const Vector& x) const {
  return family_potential(x - shift_) - std::log(scale_);
}

double LogConcaveFn::operator()(const Vector& x) const {
  const double p = family_potential(x - shift_);
  return p == kInf ? 0.0 : scale_ * std::exp(-p);
}

DecayBound LogConcaveFn::decay() const {
  DecayBound d = std::visit(
      overloaded{
          [&](const family::Gaussian& g) {
            return DecayBound{std::exp(-1.0), 1.0 / sigma_max(g.t), sigma_min(g.t), std::exp(0.25)};
          },
          [&](const family::PolytopeIndicator& p) {
            double r = 0.0;
            for (const auto& v : p.body.vertices()) r = std::max(r, v.norm());
            double b = kInf;
            for (const auto& f : facets_) b = std::min(b, f.second);
            return DecayBound{1.0, std::max(b, 0.0), 1.0 / r, std::exp(1.0)};
          },
          [&](const family::EllipsoidIndicator& e) {
            return DecayBound{1.0, sigma_min(e.t), 1.0 / sigma_max(e.t), std::exp(1.0)};
          },
          [&](const family::ExpGauge& e) {
            double r = 0.0;
            for (const auto& v : e.body.vertices()) r = std::max(r, v.norm());
            double b = kInf;
            for (const auto& f : facets_) b = std::min(b, f.second);
            return DecayBound{std::exp(-1.0), b, 1.0 / r, 1.0};
          },
          [&](const family::Product& p) {
            DecayBound out{1.0, kInf, kInf, 1.0};
            for (const auto& f : p.factors) {
              const auto fd = f.decay();
              out.a *= fd.a;
              out.b = std::min(out.b, fd.b);
              out.c = std::min(out.c, fd.c);
              out.d *= fd.d;
            }
            return out;
          },
          [&](const family::Custom& c) { return c.decay; },
      },
      family_);
  d.a *= scale_;
  d.d *= scale_ * std::exp(d.c * shift_.norm());
  return d;
}

std::function<double(double)> LogConcaveFn::ray_potential(const Vector& z, const Vector& u) const {
  const Vector p = z - shift_;
  const double ls = std::log(scale_);
  return std::visit(
      overloaded{
          [&](const family::Gaussian& g) -> std::function<double(double)> {
            const Vector tp = g.t * p, tu = g.t * u;
            const double c0 = tp.squaredNorm(), c1 = 2.0 * tp.dot(tu), c2 = tu.squaredNorm();
            return [=](double r) { return c0 + r * (c1 + r * c2) - ls; };
          },
          [&](const family::ExpGauge&) -> std::function<double(double)> {
            std::vector<double> alpha, beta;
            for (const auto& [a, b] : facets_) {
              alpha.push_back(a.dot(p) / b);
              beta.push_back(a.dot(u) / b);
            }
            return [alpha = std::move(alpha), beta = std::move(beta), ls](double r) {
              double g = 0.0;
              for (std::size_t i = 0; i < alpha.size(); ++i) g = std::max(g, alpha[i] + r * beta[i]);
              return g - ls;
            };
          },
          [&](const family::Product& pr) -> std::function<double(double)> {
            return [factors = pr.factors, pv = as_vector(p), uv = as_vector(u), ls](double r) {
              double s = 0.0;
              for (std::size_t i = 0; i < factors.size(); ++i) s += factors[i].potential(pv[i] + r * uv[i]);
              return s - ls;
            };
          },
          [&](const auto&) -> std::function<double(double)> {
            return [this, z, u](double r) { return potential(z + r * u); };
          },
      },
      family_);
}

std::vector<double> LogConcaveFn::ray_breaks(const Vector& z, const Vector& u) const {
  const Vector p = z - shift_;
  std::vector<double> out;
  auto interval_from_facets = [&]() {
    double lo = 0.0, hi = kInf;
    for (const auto& [a, b] : facets_) {
      const double au = a.dot(u);
      const double slack = b - a.dot(p);
      if (std::abs(au) < 1e-300) {
        if (slack < 0.0) return;
        continue;
      }
      const double t = slack / au;
      if (au > 0.0) {
        hi = std::min(hi, t);
      } else {
        lo = std::max(lo, t);
      }
    }
    if (hi > lo) {
      if (lo > 0.0) out.push_back(lo);
      out.push_back(hi);
    }
  };
  std::visit(overloaded{
                 [](const family::Gaussian&) {},
                 [&](const family::PolytopeIndicator&) { interval_from_facets(); },
                 [&](const family::EllipsoidIndicator& e) {
                   const auto lu = e.t.partialPivLu();
                   const Vector q = lu.solve(p);
                   const Vector v = lu.solve(u);
                   const double a = v.squaredNorm(), b = q.dot(v), c = q.squaredNorm() - 1.0;
                   const double disc = b * b - a * c;
                   if (disc <= 0.0) return;
                   const double s = std::sqrt(disc);
                   for (double t : {(-b - s) / a, (-b + s) / a}) {
                     if (t > 0.0) out.push_back(t);
                   }
                 },
                 [&](const family::ExpGauge&) {},
                 [&](const family::Product& pr) {
                   for (std::size_t i = 0; i < pr.factors.size(); ++i) {
                     const auto ui = u(static_cast<Eigen::Index>(i));
                     if (std::abs(ui) < 1e-300) continue;
                     for (double k : pr.factors[i].kinks()) {
                       const double t = (k - p(static_cast<Eigen::Index>(i))) / ui;
                       if (t > 0.0) out.push_back(t);
                     }
                   }
                 },
                 [](const family::Custom&) {},
             },
             family_);
  std::sort(out.begin(), out.end());
  return out;
}

double LogConcaveFn::support_extent(const Vector& w) const {
  const double base = shift_.dot(w);
  if (w.norm() == 0.0) return base;
  return base + std::visit(overloaded{
                               [](const family::Gaussian&) { return kInf; },
                               [&](const family::PolytopeIndicator& p) {
                                 double h = -kInf;
                                 for (const auto& v : p.body.vertices()) h = std::max(h, v.dot(w));
                                 return h;
                               },
                               [&](const family::EllipsoidIndicator& e) {
                                 return (e.t.transpose() * w).norm();
                               },
                               [](const family::ExpGauge&) { return kInf; },
                               [&](const family::Product& pr) {
                                 double h = 0.0;
                                 for (std::size_t i = 0; i < pr.factors.size(); ++i) {
                                   const double wi = w(static_cast<Eigen::Index>(i));
                                   if (wi == 0.0) continue;
                                   const auto& f = pr.factors[i];
                                   double lo = -kInf, hi = kInf;
                                   if (f.kind == Factor1D::Kind::OneSided) lo = f.q;
                                   if (f.kind == Factor1D::Kind::Uniform) {
                                     lo = f.p;
                                     hi = f.q;
                                   }
                                   h += wi > 0 ? wi * hi : wi * lo;
                                 }
                                 return h;
                               },
                               [](const family::Custom&) { return kInf; },
                           },
                           family_);
}

Vector LogConcaveFn::center_hint() const {
  Vector c = std::visit(overloaded{
                            [&](const family::PolytopeIndicator& p) {
                              Vector m = Vector::Zero(dim_);
                              for (const auto& v : p.body.vertices()) m += v;
                              return Vector(m / static_cast<double>(p.body.vertices().size()));
                            },
                            [&](const family::Product& pr) {
                              Vector m(dim_);
                              for (int i = 0; i < dim_; ++i) m(i) = pr.factors[static_cast<std::size_t>(i)].median();
                              return m;
                            },
                            [&](const family::Custom& cu) {
                              return cu.center.size() == dim_ ? cu.center : Vector(Vector::Zero(dim_));
                            },
                            [&](const auto&) { return Vector(Vector::Zero(dim_)); },
                        },
                        family_);
  return c + shift_;
}

LogConcaveFn LogConcaveFn::scaled(double d) const {
  return LogConcaveFn(family_, shift_, scale_ * d);
}

LogConcaveFn LogConcaveFn::translated(const Vector& a) const {
  return LogConcaveFn(family_, shift_ + a, scale_);
}

LogConcavityCheck check_log_concave(const LogConcaveFn& f, std::uint64_t seed, std::size_t pairs) {
  LogConcavityCheck out;
  RngCursor rng(CounterRng(seed, 0x6c63));
  const int n = f.dim();
  const Vector c = f.center_hint();
  const double s = 2.0 * f.length_scale();
  Vector a(n), b(n);
  for (std::size_t i = 0; i < pairs; ++i) {
    for (int j = 0; j < n; ++j) {
      a(j) = c(j) + s * rng.normal();
      b(j) = c(j) + s * rng.normal();
    }
    const double pa = f.potential(a), pb = f.potential(b);
    if (!std::isfinite(pa) || !std::isfinite(pb)) continue;
    const double pm = f.potential(0.5 * (a + b));
    const double excess = pm - 0.5 * (pa + pb);
    if (excess > 5e-10 + 1e-12 * std::abs(pa + pb)) {
      out.ok = false;
      out.worst = std::max(out.worst, excess);
    }
  }
  return out;
}

// ------------------------------------------------------------ level bodies

double radial_moment(const LogConcaveFn& f, const Vector& z, const Vector& u, const RadialOptions& opts) {
  const int n = f.dim();
  const auto phi = f.ray_potential(z, u);
  auto integrand = [&](double r) {
    double pw = 1.0;
    for (int k = 1; k < n; ++k) pw *= r;
    const double v = phi(r);
    return v == kInf ? 0.0 : pw * std::exp(-v);
  };
  QuadOptions q;
  q.rel_tol = opts.rel_tol;
  q.abs_tol = 1e-300;

  std::vector<double> pts{0.0};
  for (double b : f.ray_breaks(z, u)) pts.push_back(b);

  const double reach = f.support_extent(u) - z.dot(u);
  double head = 0.0;
  if (std::isfinite(reach)) {
    if (reach <= 0.0) return 0.0;
    pts.erase(std::remove_if(pts.begin() + 1, pts.end(), [&](double b) { return b >= reach * (1.0 - 1e-12); }),
              pts.end());
    pts.push_back(reach);
    head = integrate_pieces(integrand, pts, q);
  } else {
    const auto d = f.decay();
    const double env = d.d * std::exp(d.c * z.norm()) / std::pow(d.c, n);
    auto tail = [&](double r) { return env * boost::math::tgamma(static_cast<double>(n), d.c * r); };
    const double r0 = (n + 8.0) / d.c;
    pts.erase(std::remove_if(pts.begin() + 1, pts.end(), [&](double b) { return b <= 1e-12 * r0; }), pts.end());
    pts.insert(std::upper_bound(pts.begin(), pts.end(), r0), r0);
    double r = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      head += integrate(integrand, pts[i], pts[i + 1], q);
      r = pts[i + 1];
      if (r >= r0 && tail(r) <= opts.tail_rel * head) break;
    }
    while (tail(r) > opts.tail_rel * head && tail(r) > 1e-300) {
      head += tail_piece(integrand, r, 2.0 * r, head, q);
      r *= 2.0;
    }
  }
  return std::pow(head, 1.0 / n);
}

StarBody body_Kz(const LogConcaveFn& f, const Vector& z, int grid_size, const RadialOptions& opts) {
  require(z.size() == f.dim(), ErrorCode::InvalidInput, "center dimension mismatch");
  auto grid = SphereGrid::make(f.dim(), grid_size);
  std::vector<double> r(grid->size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = radial_moment(f, z, grid->node(i), opts);
    require(r[i] > 0.0, ErrorCode::CenterOutside, "level body is degenerate at this center");
  }
  return StarBody(grid, std::move(r));
}

double integral(const LogConcaveFn& f, const Vector& z, int grid_size) {
  return f.dim() * volume_star(body_Kz(f, z, grid_size));
}

// ------------------------------------------------------------- find_center

namespace {

CenteredPair center_1d(const LogConcaveFn& f, const CenterOptions& opts) {
  const double len = f.length_scale();
  const Vector e(Vector::Ones(1));
  auto g = [&](double z) {
    const Vector zz = Vector::Constant(1, z);
    const double right = radial_moment(f, zz, e);
    const double left = radial_moment(f, zz, -e);
    return 0.5 * (right - left);
  };
  double lo = f.center_hint()(0) - len, hi = f.center_hint()(0) + len;
  double glo = g(lo), ghi = g(hi);
  for (int k = 0; k < 200 && glo < 0.0; ++k) glo = g(lo -= len * (1 << std::min(k, 20)));
  for (int k = 0; k < 200 && ghi > 0.0; ++k) ghi = g(hi += len * (1 << std::min(k, 20)));
  require(glo >= 0.0 && ghi <= 0.0, ErrorCode::SolverFail, "could not bracket the median");
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double z0 = 0.5 * (a + b);
  CenteredPair out{Vector::Constant(1, z0), body_Kz(f, Vector::Constant(1, z0), 2), 0.0,
                   opts.tol_rel * len, static_cast<int>(iters), false};
  out.centroid_residual = std::abs(g(z0));
  if (out.centroid_residual > out.tolerance) {
    throw SolverError("median search did not converge", out.z0, out.centroid_residual);
  }
  return out;
}

}  // namespace

CenteredPair find_center(const LogConcaveFn& f, const CenterOptions& opts) {
  if (f.dim() == 1) return center_1d(f, opts);
  const int n = f.dim();
  const double len = f.length_scale();
  const double tol = opts.tol_rel * len;

  auto field = [&](const Vector& z) -> std::optional<Vector> {
    try {
      return centroid(body_Kz(f, z, opts.grid_size));
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto jacobian = [&](const Vector& z, const Vector& g) {
    Eigen::MatrixXd j(n, n);
    const double h = 1e-4 * len;
    for (int k = 0; k < n; ++k) {
      Vector zk = z;
      zk(k) += h;
      auto gk = field(zk);
      if (!gk) {
        zk(k) = z(k) - h;
        gk = field(zk);
        require(gk.has_value(), ErrorCode::SolverFail, "field undefined near the iterate");
        j.col(k) = (g - *gk) / h;
      } else {
        j.col(k) = (*gk - g) / h;
      }
    }
    return j;
  };

  Vector z = f.center_hint();
  auto g0 = field(z);
  require(g0.has_value(), ErrorCode::SolverFail, "level body undefined at the starting point");
  Vector g = *g0;
  Eigen::MatrixXd jac = jacobian(z, g);
  int it = 0;
  bool refreshed = true;
  for (; it < opts.max_iter && g.norm() > 1e-3 * tol; ++it) {
    const Vector step = -jac.colPivHouseholderQr().solve(g);
    bool moved = false;
    for (double t = 1.0; t > 1e-8; t *= 0.5) {
      const Vector zt = z + t * step;
      auto gt = field(zt);
      if (gt && gt->norm() < g.norm()) {
        const Vector dz = zt - z;
        const Vector dg = *gt - g;
        jac += ((dg - jac * dz) * dz.transpose()) / dz.squaredNorm();
        z = zt;
        g = *gt;
        moved = true;
        break;
      }
    }
    if (moved) {
      refreshed = false;
      continue;
    }
    if (refreshed) break;
    jac = jacobian(z, g);
    refreshed = true;
  }

  CenteredPair out{z, body_Kz(f, z, opts.grid_size), g.norm(), tol, it, false};
  if (out.centroid_residual > tol) {
    out.fallback = true;
    NelderMeadOptions nm;
    nm.initial_step = 0.1 * len;
    nm.max_evals = 600;
    auto best = nelder_mead(
        [&](const Vector& x) {
          auto gx = field(x);
          return gx ? gx->squaredNorm() : kInf;
        },
        z, nm);
    if (std::sqrt(best.value) < out.centroid_residual) {
      out.z0 = best.x;
      out.body = body_Kz(f, best.x, opts.grid_size);
      out.centroid_residual = std::sqrt(best.value);
    }
    if (out.centroid_residual > tol) {
      throw SolverError("center search did not converge", out.z0, out.centroid_residual);
    }
  }
  return out;
}

// --------------------------------------------------------- hypothesis check

Report hypothesis_check(const Evaluator& f1, const Evaluator& f2, const RhoKernel& rho, const Vector& z,
                        const HypothesisOptions& opts) {
  const int n = static_cast<int>(z.size());
  static constexpr double kSpreads[] = {0.1, 0.3, 1.0, 2.0, 4.0};
  CounterRng rng(opts.seed, 0x6879);
  double worst = 0.0;
  Vector wx = z, wy = z;
  std::size_t tested = 0;
  Vector x(n), y(n);
  for (std::size_t i = 0; i < opts.samples; ++i) {
    RngCursor cur(rng.substream(i));
    const double sx = opts.scale * kSpreads[cur.bits() % 5];
    for (int j = 0; j < n; ++j) x(j) = z(j) + sx * cur.normal();
    switch (i % 3) {
      case 0: {
        const double sy = opts.scale * kSpreads[cur.bits() % 5];
        for (int j = 0; j < n; ++j) y(j) = z(j) + sy * cur.normal();
        break;
      }
      case 1:
        y = x;
        break;
      default:
        y = z + cur.uniform(0.1, 4.0) * (x - z);
        break;
    }
    const double t = (x - z).dot(y - z);
    if (!(t > 0.0)) continue;
    ++tested;
    const double lhs = f1(x) * f2(y);
    if (lhs == 0.0) continue;
    const double r = rho(t);
    const double ratio = r > 0.0 ? lhs / (r * r) : kInf;
    if (ratio > worst) {
      worst = ratio;
      wx = x;
      wy = y;
    }
  }
  Report rep("hypothesis-check");
  rep.seed("seed", opts.seed);
  rep.set("max_ratio", worst);
  rep.set("pairs_tested", static_cast<double>(tested));
  rep.note("witness_x", as_vector(wx));
  rep.note("witness_y", as_vector(wy));
  rep.check_le("f1(x) f2(y) <= rho^2(<x-z, y-z>)", "Thm4.1-hyp", worst, 1.0, opts.slack);
  return rep;
}

// ------------------------------------------------------------ polar function

PolarFunction::PolarFunction(LogConcaveFn f, RhoKernel rho, Vector z)
    : f_(std::move(f)), rho_(std::move(rho)), z_(std::move(z)) {
  const int n = f_.dim();
  require(z_.size() == n, ErrorCode::InvalidInput, "center dimension mismatch");
  const int scan = n == 1 ? 2 : n == 2 ? 48 : n == 3 ? 384 : 1536;
  auto grid = SphereGrid::make(n, scan);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    dirs_.push_back(grid->node(i));
    rays_.push_back(f_.ray_potential(z_, dirs_.back()));
  }
  const auto d = f_.decay();
  const double len = 1.0 / d.c;
  const double far = (std::max(0.0, std::log(d.d)) + 40.0) / d.c + (f_.center_hint() - z_).norm();
  const int count = 40;
  for (int k = 0; k < count; ++k) {
    radii_.push_back(1e-3 * len * std::pow(far / (1e-3 * len), k / (count - 1.0)));
  }
}

double PolarFunction::log_value(const Vector& w) const {
  const double tstar = rho_.zero_from();
  if (std::isfinite(tstar) && f_.support_extent(w) - z_.dot(w) > tstar) return -kInf;

  auto objective = [&](const Vector& x) {
    const double t = (x - z_).dot(w);
    if (!(t > 0.0)) return kInf;
    const double phi = f_.potential(x);
    if (!std::isfinite(phi)) return kInf;
    return 2.0 * rho_.log(t) + phi;
  };

  double best = kInf;
  Vector best_x = z_ + w;
  for (std::size_t k = 0; k < dirs_.size(); ++k) {
    const double vw = dirs_[k].dot(w);
    if (!(vw > 0.0)) continue;
    for (double s : radii_) {
      const double phi = rays_[k](s);
      if (!std::isfinite(phi)) continue;
      const double val = 2.0 * rho_.log(s * vw) + phi;
      if (val < best) {
        best = val;
        best_x = z_ + s * dirs_[k];
      }
    }
  }
  {
    const double val = objective(z_ + w);
    if (val < best) {
      best = val;
      best_x = z_ + w;
    }
  }
  if (best == -kInf) return -kInf;

  NelderMeadOptions nm;
  nm.initial_step = 0.1 * std::max((best_x - z_).norm(), 1e-3 * f_.length_scale());
  nm.ftol = 1e-13;
  nm.xtol = 1e-11;
  nm.max_evals = 300 * (f_.dim() + 1);
  bool hit_zero = false;
  auto guarded = [&](const Vector& x) {
    const double v = objective(x);
    if (v == -kInf) {
      hit_zero = true;
      return -1e300;
    }
    return v;
  };
  auto res = nelder_mead(guarded, best_x, nm);
  if (hit_zero) return -kInf;
  // one restart; a collapsed simplex on a kinked objective can stall early
  nm.initial_step = 0.1 * std::max((res.x - best_x).norm(), 1e-3 * f_.length_scale());
  auto again = nelder_mead(guarded, res.x, nm);
  if (hit_zero) return -kInf;
  if (again.value < res.value) res = std::move(again);
  double v = std::min(best, res.value);
  // Past the edge of the support of g the objective falls without bound
  // along some ray; the simplex stalls on shallow slopes, so follow rays out
  // once the minimizer is escaping.
  const double reach = (res.x - z_).norm();
  if (reach > 20.0 * f_.length_scale()) {
    auto follow = [&](const Vector& from, const Vector& d) {
      double cur = objective(from);
      for (double s = reach; s < 1e300; s *= 2.0) {
        const double nv = objective(from + s * d);
        if (!(nv < cur)) break;
        cur = nv;
        if (cur < -800.0) return -kInf;
      }
      return cur;
    };
    v = std::min(v, follow(res.x, (res.x - z_) / reach));
    for (const auto& d : dirs_) {
      if (v == -kInf) break;
      if (d.dot(w) > 0.0) v = std::min(v, follow(res.x, d));
    }
  }
  return v;
}

double PolarFunction::operator()(const Vector& y) const {
  Vector w = y - z_;
  if (w.norm() == 0.0) {
    w = Vector::Zero(w.size());
    w(0) = 1e-9 * f_.length_scale();
  }
  const double lv = log_value(w);
  return lv == -kInf ? 0.0 : (1.0 - 1e-6) * std::exp(lv);
}

double PolarFunction::cutoff_radius(const Vector& u) const {
  const double tstar = rho_.zero_from();
  if (!std::isfinite(tstar)) return kInf;
  const double h = f_.support_extent(u) - z_.dot(u);
  if (!std::isfinite(h)) return 0.0;
  return h > 0.0 ? tstar / h : kInf;
}

Evaluator PolarFunction::evaluator() const {
  auto self = std::make_shared<PolarFunction>(*this);
  return [self](const Vector& y) { return (*self)(y); };
}

PolarFunction polar_function(const LogConcaveFn& f, const RhoKernel& rho, const Vector& z) {
  return PolarFunction(f, rho, z);
}

// --------------------------------------------------------------- integrals

namespace {

double ray_integral(const Evaluator& g, const Vector& z, const Vector& u, double cutoff, double start,
                    double rel_tol) {
  const int n = static_cast<int>(z.size());
  auto integrand = [&](double r) { return std::pow(r, n - 1) * g(z + r * u); };
  QuadOptions q;
  q.rel_tol = rel_tol;
  q.abs_tol = 1e-300;
  q.fail_rel = 1e-4;
  if (!std::isfinite(cutoff)) {
    // g can drop to exactly zero with a jump (exponential tails of f give a
    // bounded support for g); find the edge so the quadrature never straddles it.
    double lo = 0.0;
    for (double r = start; r < 1e6 * start; r *= 2.0) {
      if (g(z + r * u) > 0.0) {
        lo = r;
        continue;
      }
      double hi = r;
      for (int k = 0; k < 80 && hi - lo > 1e-14 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (g(z + mid * u) > 0.0 ? lo : hi) = mid;
      }
      cutoff = lo;
      break;
    }
  }
  if (std::isfinite(cutoff)) {
    if (!(cutoff > 0.0)) return 0.0;
    try {
      return integrate(integrand, 0.0, cutoff, q);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::QuadFail) throw;
    }
    // g is computed by an inner minimization that blurs a jump at the support
    // edge; composite rules tolerate that, adaptive ones do not.
    static const FixedRule unit = gauss_legendre(10, 0.0, 1.0);
    auto composite = [&](int panels) {
      const double h = cutoff / panels;
      double sum = 0.0;
      for (int p = 0; p < panels; ++p) {
        for (std::size_t i = 0; i < unit.nodes.size(); ++i) sum += unit.weights[i] * integrand((p + unit.nodes[i]) * h);
      }
      return sum * h;
    };
    const double coarse = composite(256), fine = composite(512);
    require(std::abs(fine - coarse) <= 1e-3 * std::abs(fine) + 1e-300, ErrorCode::QuadFail,
            "ray integral did not settle under panel refinement");
    return fine;
  }
  double r = start;
  double total = integrate(integrand, 0.0, r, q);
  for (int k = 0; k < 60; ++k) {
    const double piece = tail_piece(integrand, r, 2.0 * r, total, q);
    total += piece;
    r *= 2.0;
    if (piece <= 1e-12 * total || (total == 0.0 && k > 8)) break;
  }
  return total;
}

}  // namespace

double integrate_around(const Evaluator& g, const Vector& z, const std::function<double(const Vector&)>& cutoff,
                        const IntegrateOptions& opts) {
  const int n = static_cast<int>(z.size());
  auto grid = SphereGrid::make(n, n == 1 ? 2 : std::max(opts.grid_size, 4));
  double sum = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vector u = grid->node(i);
    sum += ray_integral(g, z, u, cutoff ? cutoff(u) : kInf, 1.0, opts.rel_tol);
  }
  return n * ball_volume(n) * grid->weight() * sum;
}

// ----------------------------------------------------------------- reports

Report functional_santalo_verify(const LogConcaveFn& f, const RhoKernel& rho, const std::optional<Vector>& z_in,
                                 const std::optional<Evaluator>& g_in, const FunctionalOptions& opts) {
  const int n = f.dim();
  Report rep("functional-check");
  Vector z;
  if (z_in) {
    z = *z_in;
  } else {
    const auto c = find_center(f, opts.center);
    z = c.z0;
    rep.set("center_residual", c.centroid_residual);
    rep.check_le_abs("level body centred at z", "Thm4.1", c.centroid_residual, 0.0, c.tolerance);
  }
  rep.note("z", as_vector(z));

  Evaluator g;
  std::function<double(const Vector&)> cutoff;
  if (g_in) {
    g = *g_in;
  } else {
    auto pf = std::make_shared<PolarFunction>(f, rho, z);
    g = [pf](const Vector& y) { return (*pf)(y); };
    cutoff = [pf](const Vector& u) { return pf->cutoff_radius(u); };
  }

  auto hyp_opts = opts.hypothesis;
  hyp_opts.scale = f.length_scale();
  const auto hyp = hypothesis_check([&f](const Vector& x) { return f(x); }, g, rho, z, hyp_opts);
  rep.absorb(hyp, "hypothesis.");
  if (!hyp.passed()) {
    throw Error(ErrorCode::HypothesisFail,
                "f(x) g(y) <= rho^2(<x-z,y-z>) fails with ratio " + std::to_string(hyp.value("max_ratio")) +
                    " at x=" + hyp.extra()["witness_x"].dump() + ", y=" + hyp.extra()["witness_y"].dump());
  }

  const double int_f = integral(f, z, opts.center.grid_size);
  const double int_g = integrate_around(g, z, cutoff, opts.g_integration);
  const auto kc = c_n_rho(rho, n);
  const double lhs = int_f * int_g;
  const double rhs = kc.full_integral * kc.full_integral;
  rep.set("dim", n);
  rep.set("integral_f", int_f);
  rep.set("integral_g", int_g);
  rep.set("c_n", kc.c_n);
  rep.set("lhs", lhs);
  rep.set("rhs", rhs);
  rep.set("margin", relative_margin(lhs, rhs));
  rep.note("near_equality", std::abs(relative_margin(lhs, rhs)) < opts.equality_band);
  rep.note("f", f.kind());
  rep.note("rho", rho.name());
  rep.check_le("int f int g <= (int rho(|x|^2))^2", "Thm4.1", lhs, rhs, opts.tol);
  return rep;
}

Report inclusion_check(const LogConcaveFn& f1, const Evaluator& f2, const RhoKernel& rho, int grid_size,
                       double tol) {
  const int n = f1.dim();
  const Vector origin = Vector::Zero(n);
  const auto k1 = body_Kz(f1, origin, grid_size);
  const auto& grid = k1.grid();
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < grid.size(); ++i) pts.push_back(k1.boundary_point(i));
  const auto h1 = support_on_grid(pts, origin, grid);
  const double cn = c_n_rho(rho, n).c_n;
  double worst = 0.0, tightest = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector u = grid.node(i);
    const double r2 = std::pow(ray_integral(f2, origin, u, kInf, f1.length_scale(), 1e-10), 1.0 / n);
    const double ratio = r2 * h1[i] / cn;
    worst = std::max(worst, ratio);
    tightest = std::min(tightest, ratio);
  }
  Report rep("inclusion-check");
  rep.set("c_n", cn);
  rep.set("max_ratio", worst);
  rep.set("min_ratio", tightest);
  rep.set("directions", static_cast<double>(grid.size()));
  rep.check_le("r_K2(u) <= c_n / h_K1(u)", "Incl", worst, 1.0, tol);
  return rep;
}

// ------------------------------------------------------------ Prekopa check

double integrate_orthant(int n, const Evaluator& f, double rel_tol) {
  require(n >= 1 && n <= 3, ErrorCode::InvalidInput, "orthant integration supports n <= 3");
  QuadOptions q;
  q.rel_tol = rel_tol;
  q.abs_tol = 1e-300;
  q.fail_rel = 1e-5;
  Vector x(n);
  std::function<double(int)> nest = [&](int k) -> double {
    return integrate(
        [&, k](double t) {
          x(k) = t;
          return k + 1 == n ? f(x) : nest(k + 1);
        },
        0.0, kInf, q);
  };
  return nest(0);
}

double integrate_log_substituted(int n, const Evaluator& f, double rel_tol) {
  require(n >= 1 && n <= 3, ErrorCode::InvalidInput, "substituted integration supports n <= 3");
  QuadOptions q;
  q.rel_tol = rel_tol;
  q.abs_tol = 1e-300;
  q.fail_rel = 1e-5;
  Vector x(n);
  std::function<double(int, double)> nest = [&](int k, double jac) -> double {
    return integrate(
        [&, k, jac](double t) {
          const double et = std::exp(t);
          x(k) = et;
          if (k + 1 < n) return nest(k + 1, jac * et);
          const double v = f(x);
          return v == 0.0 ? 0.0 : v * jac * et;
        },
        -kInf, kInf, q);
  };
  return nest(0, 1.0);
}

Report prekopa_geometric_check(int n, const Evaluator& f1, const Evaluator& f2, const Evaluator& f3,
                               const PrekopaOptions& opts) {
  CounterRng rng(opts.seed, 0x706c);
  double worst = 0.0;
  Vector wx = Vector::Zero(n), wy = Vector::Zero(n);
  Vector x(n), y(n), m(n);
  for (std::size_t i = 0; i < opts.samples; ++i) {
    RngCursor cur(rng.substream(i));
    auto draw = [&](Vector& v) {
      for (int j = 0; j < n; ++j) {
        v(j) = cur.bits() & 1u ? cur.uniform(0.0, opts.sample_scale)
                               : std::exp(cur.uniform(std::log(1e-4), std::log(4.0 * opts.sample_scale)));
      }
    };
    draw(x);
    if (i % 3 == 0) {
      draw(y);
    } else {
      const double lam = std::exp(cur.uniform(-3.0, 3.0));
      y = (i % 3 == 1) ? x : Vector(lam * x);
    }
    const double lhs = f1(x) * f2(y);
    if (lhs == 0.0) continue;
    m = (x.array() * y.array()).sqrt().matrix();
    const double r = f3(m);
    const double ratio = r > 0.0 ? lhs / (r * r) : kInf;
    if (ratio > worst) {
      worst = ratio;
      wx = x;
      wy = y;
    }
  }
  if (worst > 1.0 + 1e-9) {
    throw Error(ErrorCode::HypothesisFail,
                "f1(x) f2(y) <= f3(sqrt(xy))^2 fails with ratio " + std::to_string(worst) + " at x=" +
                    nlohmann::json(as_vector(wx)).dump() + ", y=" + nlohmann::json(as_vector(wy)).dump());
  }

  Report rep("prekopa-check");
  rep.seed("seed", opts.seed);
  rep.set("max_ratio", worst);
  rep.note("witness_x", as_vector(wx));
  rep.note("witness_y", as_vector(wy));
  const Evaluator* fs[] = {&f1, &f2, &f3};
  double ints[3];
  for (int j = 0; j < 3; ++j) {
    ints[j] = integrate_orthant(n, *fs[j]);
    const double sub = integrate_log_substituted(n, *fs[j]);
    const std::string k = std::to_string(j + 1);
    rep.set("integral_f" + k, ints[j]);
    rep.set("substituted_f" + k, sub);
    rep.check_near("exponential substitution f" + k, "Prop2.1", sub, ints[j], 1e-3);
    if (opts.unconditional) rep.set("full_integral_f" + k, std::ldexp(ints[j], n));
  }
  const double lhs = ints[0] * ints[1];
  const double rhs = ints[2] * ints[2];
  rep.set("lhs", lhs);
  rep.set("rhs", rhs);
  rep.set("margin", relative_margin(lhs, rhs));
  rep.check_le("int f1 int f2 <= (int f3)^2", "Prop2.1", lhs, rhs, opts.tol);
  return rep;
}

}  // namespace santalo
