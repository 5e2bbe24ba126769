#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "santalo/error.hpp"
#include "santalo/geometry.hpp"
#include "santalo/logconcave.hpp"
#include "santalo/polar.hpp"
#include "santalo/rng.hpp"

using namespace santalo;
using std::numbers::pi;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

Evaluator eval(const LogConcaveFn& f) {
  return [f](const Vector& x) { return f(x); };
}

}  // namespace

TEST_CASE("kernel constants") {
  CHECK(c_n_rho(RhoKernel::indicator(), 2).c_n == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c_n_rho(RhoKernel::exp(), 2).c_n == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(c_n_rho(RhoKernel::indicator(), 1).c_n == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 1; n <= 4; ++n) {
    const auto k = c_n_rho(RhoKernel::exp(), n);
    CHECK(k.radial_integral == doctest::Approx(std::tgamma(n / 2.0) / 2).epsilon(1e-10));
    CHECK(k.full_integral == doctest::Approx(std::pow(pi, n / 2.0)).epsilon(1e-10));
    for (double m : {1.0, 2.5}) {
      CHECK(c_n_rho(RhoKernel::power(m), n).radial_integral ==
            doctest::Approx(0.5 * boost::math::beta(n / 2.0, m + 1)).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(c_n_rho(RhoKernel::piecewise({0.0, 1.0}, {0.0, 0.0}), 2), Error);
  try {
    c_n_rho(RhoKernel::piecewise({0.0, 1.0}, {0.0, 0.0}), 2);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivergentKernel);
  }
}

TEST_CASE("kernel flags") {
  for (const auto& k : {RhoKernel::exp(), RhoKernel::power(1.0), RhoKernel::power(3.0), RhoKernel::indicator(),
                        RhoKernel::piecewise({0.0, 1.0, 3.0}, {0.0, -0.5, -3.0}, true)}) {
    const auto v = k.verify();
    CHECK_MESSAGE(v.ok, k.name() << " " << v.failed);
    CHECK(k.log_concave());
    CHECK(k.non_increasing());
    CHECK(k.geometric_mean_dominant());
  }
  const auto bumpy = RhoKernel::piecewise({0.0, 1.0, 2.0}, {0.0, -2.0, -2.5});
  CHECK_FALSE(bumpy.log_concave());
  CHECK(bumpy.verify().ok);
  CHECK(RhoKernel::exp().strictly_convex());
  CHECK_FALSE(RhoKernel::power(2.0).strictly_convex());
  CHECK(RhoKernel::power(2.0)(-1.0) == doctest::Approx(4.0));
}

TEST_CASE("radial moments and level bodies") {
  for (int n = 1; n <= 3; ++n) {
    const auto f = LogConcaveFn::ball_indicator(n);
    Vector u = Vector::Zero(n);
    u(0) = 1;
    CHECK(radial_moment(f, Vector::Zero(n), u) == doctest::Approx(std::pow(1.0 / n, 1.0 / n)).epsilon(1e-10));
  }
  const auto g = LogConcaveFn::standard_gaussian(2);
  CHECK(radial_moment(g, Vector::Zero(2), vec({0.6, 0.8})) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  const Vector a = vec({0.7, -1.2});
  CHECK(radial_moment(g.translated(a), a, vec({0.6, 0.8})) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));

  const auto k0 = body_Kz(g, Vector::Zero(2));
  CHECK(volume_star(k0) == doctest::Approx(pi / 2).epsilon(1e-9));
  CHECK(integral(g, Vector::Zero(2)) == doctest::Approx(pi).epsilon(1e-9));
  CHECK(certify_convex(k0));
}

TEST_CASE("property: translation equivariance of K_z") {
  const auto f = LogConcaveFn::exp_gauge(make_regular_polygon(5, 1.0, 0.1), vec({0.2, 0.1}));
  const Vector a = vec({1.5, -0.5});
  const Vector z = vec({0.3, 0.0});
  const auto k1 = body_Kz(f, z, 512);
  const auto k2 = body_Kz(f.translated(a), z + a, 512);
  double worst = 0;
  for (std::size_t i = 0; i < k1.grid().size(); ++i) worst = std::max(worst, std::abs(k1.radial(i) - k2.radial(i)));
  CHECK(worst < 1e-10);
}

TEST_CASE("property: volume identity and convexity of K_z") {
  RngCursor rng(CounterRng(5, 1));
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) t(i, j) += 0.4 * rng.uniform(-1, 1);
    }
    Vector shift(n);
    for (int i = 0; i < n; ++i) shift(i) = rng.uniform(-1, 1);
    const auto f = LogConcaveFn::gaussian(t, shift);
    Vector z = shift;
    z(0) += 0.3 * rng.uniform(-1, 1);
    const double exact = std::pow(pi, n / 2.0) / std::abs(t.determinant());
    const auto k = body_Kz(f, z, n == 2 ? 1024 : 4096);
    CHECK(n * volume_star(k) == doctest::Approx(exact).epsilon(1e-2));
    CHECK(certify_convex(k));
  }
  const auto sq = LogConcaveFn::indicator(make_cube(2));
  CHECK(integral(sq, vec({0.4, -0.5})) == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(certify_convex(body_Kz(sq, vec({0.4, -0.5}))));
}

TEST_CASE("radial decay away from the center") {
  const auto g = LogConcaveFn::standard_gaussian(2);
  double prev = 1e300;
  for (double s = 3.0; s <= 8.0; s += 0.5) {
    const double r = radial_moment(g, vec({s, 0.0}), vec({0.0, 1.0}));
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("find_center") {
  const auto g = LogConcaveFn::standard_gaussian(2);
  const auto c0 = find_center(g);
  CHECK(c0.z0.norm() <= 1e-6);
  const Vector a = vec({1.0, -0.5});
  const auto ca = find_center(g.translated(a));
  CHECK((ca.z0 - a).norm() <= 1e-6);

  const auto one_sided = LogConcaveFn::product({{Factor1D::Kind::OneSided, 1.0, 0.0}});
  const auto c1 = find_center(one_sided);
  CHECK(c1.z0(0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(c1.body.radial(0) == doctest::Approx(c1.body.radial(1)).epsilon(1e-9));

  const auto skew = LogConcaveFn::product({{Factor1D::Kind::OneSided, 1.0, 0.0}, {Factor1D::Kind::Gaussian, 2.0, 0.3}});
  const auto cs = find_center(skew);
  CHECK(cs.centroid_residual <= cs.tolerance);
  CHECK(centroid(cs.body).norm() <= cs.tolerance);
  CHECK(cs.z0(1) == doctest::Approx(0.3).epsilon(1e-6));

  const auto tri = LogConcaveFn::indicator(PolytopeV({vec({0, 0}), vec({2, 0}), vec({0, 1})}));
  const auto ct = find_center(tri);
  CHECK(ct.centroid_residual <= ct.tolerance);
}

TEST_CASE("hypothesis checks") {
  const auto g = LogConcaveFn::standard_gaussian(2);
  const auto ok = hypothesis_check(eval(g), eval(g), RhoKernel::exp(), Vector::Zero(2));
  CHECK(ok.passed());
  CHECK(ok.value("max_ratio") == doctest::Approx(1.0).epsilon(1e-12));

  const auto sq = LogConcaveFn::indicator(make_cube(2));
  const auto dia = LogConcaveFn::indicator(make_cross_polytope(2));
  CHECK(hypothesis_check(eval(sq), eval(dia), RhoKernel::indicator(), Vector::Zero(2)).passed());

  const auto bad = hypothesis_check(eval(g.scaled(2.0)), eval(g), RhoKernel::exp(), Vector::Zero(2));
  CHECK_FALSE(bad.passed());
  CHECK(bad.value("max_ratio") == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("polar function") {
  const auto g = LogConcaveFn::standard_gaussian(2);
  const auto pf = polar_function(g, RhoKernel::exp(), Vector::Zero(2));
  RngCursor rng(CounterRng(3, 0));
  for (int i = 0; i < 50; ++i) {
    const Vector y = vec({rng.uniform(-2, 2), rng.uniform(-2, 2)});
    CHECK(std::abs(pf(y) - std::exp(-y.squaredNorm())) <= 1e-6);
  }
  const auto ball = LogConcaveFn::ball_indicator(2);
  const auto pb = polar_function(ball, RhoKernel::indicator(), Vector::Zero(2));
  CHECK(pb(vec({0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(pb(vec({0.8, 0.7})) == 0.0);
  const auto pd = polar_function(g.scaled(3.0), RhoKernel::exp(), Vector::Zero(2));
  CHECK(pd(vec({0.3, -0.4})) == doctest::Approx(pf(vec({0.3, -0.4})) / 3.0).epsilon(1e-9));
}

TEST_CASE("functional Santalo: gaussian equality") {
  for (int n = 1; n <= 2; ++n) {
    const auto r = functional_santalo_verify(LogConcaveFn::standard_gaussian(n), RhoKernel::exp());
    CHECK(r.passed());
    CHECK(r.value("lhs") == doctest::Approx(std::pow(pi, n)).epsilon(1e-3));
    CHECK(r.value("rhs") == doctest::Approx(std::pow(pi, n)).epsilon(1e-3));
    CHECK(std::abs(r.value("margin")) < 1e-3);
  }
  const Vector a = vec({1.0, 0.0});
  const auto shifted = functional_santalo_verify(LogConcaveFn::standard_gaussian(2).translated(a), RhoKernel::exp(), a);
  CHECK(shifted.passed());
  CHECK(std::abs(shifted.value("margin")) < 1e-2);
}

TEST_CASE("functional Santalo: indicator of the square") {
  const auto sq = LogConcaveFn::indicator(make_cube(2));
  const auto r = functional_santalo_verify(sq, RhoKernel::indicator(), Vector::Zero(2));
  CHECK(r.passed());
  CHECK(r.value("lhs") == doctest::Approx(8.0).epsilon(1e-3));
  CHECK(r.value("rhs") == doctest::Approx(pi * pi).epsilon(1e-9));
}

TEST_CASE("functional Santalo rejects an incompatible g") {
  const auto g = LogConcaveFn::standard_gaussian(2);
  const Evaluator too_big = [](const Vector& y) { return 2.0 * std::exp(-y.squaredNorm()); };
  CHECK_THROWS_AS(functional_santalo_verify(g, RhoKernel::exp(), Vector::Zero(2), too_big), Error);
}

TEST_CASE("property: scaling duality") {
  const auto f = LogConcaveFn::exp_gauge(make_regular_polygon(5), vec({0.1, 0.0}));
  const double d = 3.7;
  const auto pf = polar_function(f, RhoKernel::exp(), vec({0.1, 0.0}));
  const Vector y = vec({0.4, 0.2});
  const double lhs1 = f(vec({0.3, 0.1})) * pf(y);
  const double lhs2 = f.scaled(d)(vec({0.3, 0.1})) * (pf(y) / d);
  CHECK(std::abs(lhs1 - lhs2) <= 1e-12 * lhs1);
}

TEST_CASE("inclusion") {
  const auto g = LogConcaveFn::standard_gaussian(2);
  const auto r = inclusion_check(g, eval(g), RhoKernel::exp());
  CHECK(r.passed());
  CHECK(r.value("min_ratio") >= 1 - 1e-3);
  CHECK(r.value("max_ratio") <= 1 + 1e-6);
  const auto zero = inclusion_check(g, [](const Vector&) { return 0.0; }, RhoKernel::exp(), 256);
  CHECK(zero.passed());
  CHECK(zero.value("max_ratio") == 0.0);
  const auto ball = LogConcaveFn::ball_indicator(2);
  CHECK(inclusion_check(ball, eval(ball), RhoKernel::indicator()).value("min_ratio") >= 1 - 1e-3);
}

TEST_CASE("Prekopa geometric mean") {
  const Evaluator e = [](const Vector& x) { return std::exp(-x(0)); };
  const auto r1 = prekopa_geometric_check(1, e, e, e);
  CHECK(r1.passed());
  CHECK(r1.value("lhs") == doctest::Approx(1.0).epsilon(1e-9));

  // f1 = e^{-2x}, f2 = e^{-x/2}: the hypothesis is 2x + y/2 >= 2 sqrt(xy)
  const Evaluator f1 = [](const Vector& x) { return std::exp(-2 * x(0)); };
  const Evaluator f2 = [](const Vector& x) { return std::exp(-x(0) / 2); };
  const auto r2 = prekopa_geometric_check(1, f1, f2, e);
  CHECK(r2.passed());
  CHECK(r2.value("max_ratio") <= 1.0 + 1e-12);
  CHECK(r2.value("lhs") == doctest::Approx(1.0).epsilon(1e-9));

  for (double c : {0.5, 3.0}) {
    for (double d : {0.2, 4.0}) {
      const Evaluator g1 = [=](const Vector& x) { return d * std::exp(-c * x(0)); };
      const Evaluator g2 = [=](const Vector& x) { return std::exp(-x(0) / c) / d; };
      const auto r = prekopa_geometric_check(1, g1, g2, e);
      CHECK(std::abs(r.value("margin")) < 1e-3);
    }
  }

  const Evaluator big = [](const Vector& x) { return 2 * std::exp(-x(0)); };
  CHECK_THROWS_AS(prekopa_geometric_check(1, big, e, e), Error);

  const Evaluator e2 = [](const Vector& x) { return std::exp(-x(0) - x(1)); };
  const auto r3 = prekopa_geometric_check(2, e2, e2, e2, {5000, 1, 4.0, 1e-3, true});
  CHECK(r3.passed());
  CHECK(r3.value("full_integral_f1") == doctest::Approx(4.0).epsilon(1e-8));
}
