#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <cstring>
#include <limits>
#include <numbers>

#include "santalo/error.hpp"
#include "santalo/legendre.hpp"
#include "santalo/rng.hpp"

using namespace santalo;
using std::numbers::pi;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

// Plain double loops, nested in the same association as the axis passes.
std::vector<double> brute_1d(const GridFn& f, const std::vector<double>& y) {
  std::vector<double> out(y.size(), -inf);
  for (std::size_t j = 0; j < y.size(); ++j) {
    for (std::size_t i = 0; i < f.axes[0].size(); ++i) {
      if (!std::isfinite(f.values[i])) continue;
      out[j] = std::max(out[j], f.axes[0][i] * y[j] - f.values[i]);
    }
  }
  return out;
}

std::vector<double> brute_2d(const GridFn& f, const Axes& dual) {
  const auto& a = f.axes[0];
  const auto& b = f.axes[1];
  std::vector<double> out(dual[0].size() * dual[1].size(), -inf);
  for (std::size_t j0 = 0; j0 < dual[0].size(); ++j0) {
    for (std::size_t j1 = 0; j1 < dual[1].size(); ++j1) {
      double best = -inf;
      for (std::size_t i0 = 0; i0 < a.size(); ++i0) {
        for (std::size_t i1 = 0; i1 < b.size(); ++i1) {
          const double v = f.values[i0 * b.size() + i1];
          if (!std::isfinite(v)) continue;
          best = std::max(best, a[i0] * dual[0][j0] + (b[i1] * dual[1][j1] - v));
        }
      }
      out[j0 * dual[1].size() + j1] = best;
    }
  }
  return out;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

GridFn random_convex_2d(std::uint64_t seed, std::size_t nodes) {
  RngCursor rng(CounterRng(seed, 3));
  const int kind = static_cast<int>(rng.bits() % 3);
  const double a = rng.uniform(0.2, 3), b = rng.uniform(0.2, 3), c = rng.uniform(-0.5, 0.5);
  std::vector<Vector> slopes;
  std::vector<double> offs;
  for (int k = 0; k < 6; ++k) {
    slopes.push_back(vec({rng.uniform(-2, 2), rng.uniform(-2, 2)}));
    offs.push_back(rng.uniform(-1, 1));
  }
  auto axes = uniform_axes(2, -3, 3, nodes);
  return GridFn::sample(axes, [&](const Vector& x) {
    if (kind == 0) return 0.5 * (a * x(0) * x(0) + b * x(1) * x(1)) + c * x(0) * x(1);
    double m = -inf;
    for (std::size_t k = 0; k < slopes.size(); ++k) m = std::max(m, slopes[k].dot(x) + offs[k]);
    if (kind == 1) return m;
    return m + 0.1 * x.squaredNorm();
  });
}

}  // namespace

TEST_CASE("self-dual quadratic and x^2") {
  const auto phi = GridFn::sample({uniform_axis(-8, 8, 1601)}, [](const Vector& x) { return 0.5 * x(0) * x(0); });
  const auto y = uniform_axis(-4, 4, 81);
  const auto l = legendre_transform(phi, vec({0}), {y});
  const double h = 0.01;
  for (std::size_t j = 0; j < y.size(); ++j) {
    CHECK(l.values[j] <= 0.5 * y[j] * y[j] + 1e-12);
    CHECK(l.values[j] >= 0.5 * y[j] * y[j] - h * h / 8 - 1e-12);
  }
  const auto sq = GridFn::sample({uniform_axis(-8, 8, 1601)}, [](const Vector& x) { return x(0) * x(0); });
  const auto l2 = legendre_transform(sq, vec({0}), {y});
  for (std::size_t j = 0; j < y.size(); ++j) {
    CHECK(std::abs(l2.values[j] - 0.25 * y[j] * y[j]) <= h * h / 4 + 1e-12);
  }
}

TEST_CASE("point indicator gives a linear transform") {
  auto axes = uniform_axes(2, -2, 2, 41);
  const Vector a = vec({0.7, -1.3});
  GridFn phi = GridFn::sample(axes, [&](const Vector& x) { return (x - a).norm() < 1e-9 ? 0.0 : inf; });
  const auto conj = conjugate(phi, vec({0, 0}), uniform_axes(2, -5, 5, 21));
  for (std::size_t f = 0; f < conj.fn.size(); ++f) {
    CHECK(conj.fn.values[f] == doctest::Approx(a.dot(conj.fn.node(f))).epsilon(1e-12));
    CHECK(conj.trusted[f] == 1);
  }
  GridFn empty = phi;
  for (double& v : empty.values) v = inf;
  try {
    legendre_transform(empty, vec({0, 0}));
    FAIL("expected EmptyDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyDomain);
  }
}

TEST_CASE("factorized transform is bit-identical to brute force") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::size_t nodes = 17 + 4 * seed;
    const auto phi = random_convex_2d(seed, std::min<std::size_t>(nodes, 64));
    const auto dual = slope_axes(phi);
    const auto fast = legendre_transform(phi, vec({0, 0}), dual);
    CHECK(bit_equal(fast.values, brute_2d(phi, dual)));
  }
  // non-convex, partly infinite and affine inputs
  RngCursor rng(CounterRng(5, 9));
  auto axes = uniform_axes(2, -2, 2, 64);
  const auto noisy = GridFn::sample(axes, [&](const Vector&) { return rng.uniform(-1, 1); });
  const auto dual = uniform_axes(2, -3, 3, 64);
  CHECK(bit_equal(legendre_transform(noisy, vec({0, 0}), dual).values, brute_2d(noisy, dual)));
  const auto holes = GridFn::sample(axes, [](const Vector& x) { return x.norm() < 1.5 ? x.squaredNorm() : inf; });
  CHECK(bit_equal(legendre_transform(holes, vec({0, 0}), dual).values, brute_2d(holes, dual)));
  const auto affine = GridFn::sample(axes, [](const Vector& x) { return 0.3 * x(0) - 0.1 * x(1) + 0.7; });
  Axes hits{uniform_axis(-0.6, 1.2, 7), uniform_axis(-0.4, 0.2, 7)};
  CHECK(bit_equal(legendre_transform(affine, vec({0, 0}), hits).values, brute_2d(affine, hits)));
  for (std::uint64_t seed = 20; seed < 40; ++seed) {
    RngCursor r(CounterRng(seed, 1));
    const double s = r.uniform(-2, 2), c = r.uniform(-1, 1);
    const auto line = GridFn::sample({uniform_axis(-1, 1, 50)}, [&](const Vector& x) { return s * x(0) + c; });
    std::vector<double> y{s, std::nextafter(s, inf), -s, 0.0};
    std::sort(y.begin(), y.end());
    y.erase(std::unique(y.begin(), y.end()), y.end());
    CHECK(bit_equal(legendre_transform(line, vec({0}), {y}).values, brute_1d(line, y)));
  }
}

TEST_CASE("general center reduces to the shifted transform") {
  const Vector z = vec({0.4, -0.25});
  const auto phi = random_convex_2d(3, 33);
  const auto dual = slope_axes(phi);
  const auto lz = legendre_transform(phi, z, dual);
  for (std::size_t f = 0; f < lz.size(); f += 37) {
    const Vector y = lz.node(f);
    double best = -inf;
    for (std::size_t i = 0; i < phi.size(); ++i) best = std::max(best, (phi.node(i) - z).dot(y - z) - phi.values[i]);
    CHECK(lz.values[f] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("order reversal and Fenchel-Young") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto p1 = random_convex_2d(seed, 25);
    auto p2 = p1;
    RngCursor rng(CounterRng(seed, 4));
    for (double& v : p2.values) v += rng.uniform(0, 0.5);
    const auto dual = slope_axes(p1);
    const auto l1 = legendre_transform(p1, vec({0, 0}), dual);
    const auto l2 = legendre_transform(p2, vec({0, 0}), dual);
    for (std::size_t j = 0; j < l1.size(); ++j) CHECK(l2.values[j] <= l1.values[j]);
    double worst = inf;
    for (std::size_t i = 0; i < p1.size(); i += 7) {
      for (std::size_t j = 0; j < l1.size(); j += 5) {
        worst = std::min(worst, p1.values[i] + l1.values[j] - p1.node(i).dot(l1.node(j)));
      }
    }
    CHECK(worst >= -1e-12);
  }
}

TEST_CASE("trust mask flags boundary maximizers") {
  const auto phi = GridFn::sample({uniform_axis(-2, 2, 41)}, [](const Vector& x) { return 0.5 * x(0) * x(0); });
  const auto conj = conjugate(phi, vec({0}), {uniform_axis(-3, 3, 61)});
  for (std::size_t j = 0; j < conj.fn.size(); ++j) {
    const double y = conj.fn.axes[0][j];
    if (std::abs(y) > 2.0 + 1e-9) CHECK(conj.trusted[j] == 0);
    if (std::abs(y) < 1.9) CHECK(conj.trusted[j] == 1);
  }
  CHECK(conj.untrusted >= 20);
}

TEST_CASE("biconjugate checks") {
  const auto q = GridFn::sample({uniform_axis(-4, 4, 161)}, [](const Vector& x) { return 0.5 * x(0) * x(0); });
  const auto rq = biconjugate_check(q, vec({0}));
  CHECK(rq.passed());
  CHECK(rq.value("interior_defect") <= 0.05 * 0.05);

  const auto aff = GridFn::sample({uniform_axis(-3, 3, 61)}, [](const Vector& x) { return 1.5 * x(0) - 2.0; });
  const auto ra = biconjugate_check(aff, vec({0}));
  CHECK(ra.passed());
  CHECK(ra.value("max_defect") <= 1e-9);

  const auto notch = GridFn::sample({uniform_axis(-2, 4, 601)}, [](const Vector& x) {
    return std::min(x(0) * x(0), (x(0) - 2) * (x(0) - 2) + 1);
  });
  const auto rn = biconjugate_check(notch, vec({0}));
  CHECK(rn.passed());
  // the envelope is the common tangent 0.5 x - 1/16 on [1/4, 9/4]
  CHECK(rn.value("max_defect") == doctest::Approx(1.0).epsilon(1e-2));
  const double worst = rn.extra()["worst_node"][0].get<double>();
  CHECK(worst == doctest::Approx(1.25).epsilon(0.02));

  const auto q2 = GridFn::sample(uniform_axes(2, -3, 3, 61),
                                 [](const Vector& x) { return x(0) * x(0) + 0.5 * x(1) * x(1) + 0.3 * x(0) * x(1); });
  CHECK(biconjugate_check(q2, vec({0.2, 0.1})).passed());
}

TEST_CASE("involution defect shrinks quadratically") {
  double prev = 0.0;
  for (std::size_t nodes : {40, 80, 160, 320, 640}) {
    const auto q = GridFn::sample({uniform_axis(-4, 4, nodes)},
                                  [](const Vector& x) { return std::exp(0.3 * x(0)) + x(0) * x(0); });
    BiconjugateOptions o;
    o.dual_axes = slope_axes(q, 0.5);
    const double d = biconjugate_check(q, vec({0}), o).value("interior_defect");
    if (prev > 0.0) CHECK(prev / d >= 3.5);
    prev = d;
  }
}

TEST_CASE("grid integral and optimal center") {
  const auto axes = uniform_axes(2, -9, 9, 181);
  const auto phi = GridFn::sample(axes, [](const Vector& x) { return 0.5 * x.squaredNorm(); });
  const auto i = integrate_rho(phi, RhoKernel::exp());
  CHECK(i.value == doctest::Approx(2 * pi).epsilon(1e-10));
  CHECK(i.error_estimate < 1e-8);

  const auto c = optimal_center(phi, RhoKernel::exp());
  CHECK(c.z0.norm() < 1e-6);
  CHECK(c.residual <= 1e-6);
  CHECK_FALSE(c.nonunique_possible);

  const Vector a = vec({0.8, -0.5});
  const auto shifted = GridFn::sample(axes, [&](const Vector& x) { return 0.5 * (x - a).squaredNorm(); });
  const auto cs = optimal_center(shifted, RhoKernel::exp());
  CHECK((cs.z0 - a).norm() < 1e-3);
  CHECK(cs.objective == doctest::Approx(c.objective).epsilon(2e-3));

  const auto ci = optimal_center(phi, RhoKernel::indicator());
  CHECK(ci.nonunique_possible);
}

TEST_CASE("legendre santalo equality cases") {
  const auto axes = uniform_axes(2, -9, 9, 361);
  const auto gauss = GridFn::sample(axes, [](const Vector& x) { return 0.5 * x.squaredNorm(); });
  const auto r = legendre_santalo_verify(gauss, RhoKernel::exp());
  CHECK(r.passed());
  CHECK(std::abs(r.value("margin")) <= 1e-3);
  CHECK(r.value("bound") == doctest::Approx(4 * pi * pi).epsilon(1e-10));

  Axes wide{uniform_axis(-9, 9, 401), uniform_axis(-20, 20, 401)};
  const auto aniso = GridFn::sample(wide, [](const Vector& x) { return 0.5 * (4 * x(0) * x(0) + 0.25 * x(1) * x(1)); });
  const auto ra = legendre_santalo_verify(aniso, RhoKernel::exp());
  CHECK(ra.passed());
  CHECK(std::abs(ra.value("margin")) <= 1e-2);

  const auto lifted = GridFn::sample(axes, [](const Vector& x) { return 0.5 * x.squaredNorm() + 1.0; });
  const auto rl = legendre_santalo_verify(lifted, RhoKernel::exp());
  CHECK(rl.passed());
  CHECK(std::abs(rl.value("margin")) <= 1e-3);
  CHECK(rl.value("equality.c") == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_AS(legendre_santalo_verify(gauss, RhoKernel::piecewise({0, 1, 2}, {0, -1, 0})), Error);
}

TEST_CASE("legendre santalo strict cases") {
  const auto axes = uniform_axes(2, -6, 6, 121);
  for (const auto& rho : {RhoKernel::exp(), RhoKernel::power(2), RhoKernel::indicator()}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      RngCursor rng(CounterRng(seed, 11));
      std::vector<Vector> s;
      std::vector<double> b;
      for (int k = 0; k < 5; ++k) {
        const double t = 2 * pi * k / 5 + rng.uniform(-0.3, 0.3);
        s.push_back(rng.uniform(0.5, 2) * vec({std::cos(t), std::sin(t)}));
        b.push_back(rng.uniform(-0.3, 0.3));
      }
      const auto phi = GridFn::sample(axes, [&](const Vector& x) {
        double m = -inf;
        for (std::size_t k = 0; k < s.size(); ++k) m = std::max(m, s[k].dot(x) + b[k]);
        return m;
      });
      const auto r = legendre_santalo_verify(phi, rho);
      CHECK(r.passed());
      CHECK(r.value("margin") > 0.0);
    }
  }
}

TEST_CASE("equality diagnostics") {
  const auto axes = uniform_axes(2, -4, 4, 41);
  const auto g = GridFn::sample(axes, [](const Vector& x) { return 0.5 * x.squaredNorm(); });
  const auto r = equality_diagnostics(g, RhoKernel::exp(), vec({0, 0}));
  CHECK(r.value("fit_residual") <= 1e-8);
  CHECK(std::abs(r.value("c")) <= 1e-8);
  CHECK(r.extra()["equality_form"].get<bool>());
  CHECK(r.extra()["TtT"][0][0].get<double>() == doctest::Approx(1.0).epsilon(1e-10));

  const auto t = GridFn::sample(axes, [](const Vector& x) { return 0.5 * (4 * x(0) * x(0) + 0.25 * x(1) * x(1)); });
  const auto rt = equality_diagnostics(t, RhoKernel::exp(), vec({0, 0}));
  CHECK(rt.value("fit_residual") <= 1e-6);
  CHECK(rt.extra()["TtT"][0][0].get<double>() == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(rt.extra()["TtT"][1][1].get<double>() == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(std::abs(rt.extra()["TtT"][0][1].get<double>()) <= 1e-8);

  const auto quartic = GridFn::sample(axes, [](const Vector& x) { return x.squaredNorm() * x.squaredNorm(); });
  const auto rq = equality_diagnostics(quartic, RhoKernel::exp(), vec({0, 0}));
  CHECK(rq.value("fit_residual") > 1e-2);
  CHECK_FALSE(rq.extra()["equality_form"].get<bool>());

  const auto lifted = GridFn::sample(axes, [](const Vector& x) { return 0.5 * x.squaredNorm() + 0.5; });
  CHECK_FALSE(equality_diagnostics(lifted, RhoKernel::power(2), vec({0, 0})).extra()["equality_form"].get<bool>());
  CHECK(equality_diagnostics(lifted, RhoKernel::exp(), vec({0, 0})).extra()["equality_form"].get<bool>());
}
