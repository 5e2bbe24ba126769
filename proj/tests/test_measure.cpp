#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "santalo/error.hpp"
#include "santalo/measure.hpp"
#include "santalo/rng.hpp"

using namespace santalo;
using std::numbers::pi;

namespace {

double gauss_square() {
  const double s = std::sqrt(2 * pi) * std::erf(1 / std::sqrt(2.0));
  return s * s;
}

double gauss_diamond() {
  return oracle::simpson(
      [](double x) {
        return std::exp(-0.5 * x * x) * std::sqrt(2 * pi) * std::erf((1 - std::abs(x)) / std::sqrt(2.0));
      },
      -1.0, 1.0, 4000);
}

PolytopeV random_hexagon(std::uint64_t seed) {
  RngCursor rng(CounterRng(seed, 21));
  std::vector<Vector> v;
  for (int i = 0; i < 3; ++i) {
    const double a = i * pi / 3 + rng.uniform(-0.4, 0.4);
    const double r = rng.uniform(0.5, 2.0);
    Vector p(2);
    p << r * std::cos(a), r * std::sin(a);
    v.push_back(p);
    v.push_back(-p);
  }
  return PolytopeV(v);
}

}  // namespace

TEST_CASE("gaussian measures against closed forms") {
  const auto g = DensityMeasure::gaussian(2);
  CHECK(measure_of(g, make_ball(2)) == doctest::Approx(2 * pi * (1 - std::exp(-0.5))).epsilon(1e-8));
  CHECK(measure_of(g, make_cube(2)) == doctest::Approx(gauss_square()).epsilon(1e-5));
  CHECK(measure_of(g, make_cross_polytope(2)) == doctest::Approx(gauss_diamond()).epsilon(1e-5));
  CHECK(measure_of(DensityMeasure::gaussian(1), make_cube(1)) ==
        doctest::Approx(std::sqrt(2 * pi) * std::erf(1 / std::sqrt(2.0))).epsilon(1e-10));
}

TEST_CASE("monte carlo agrees with quadrature") {
  const auto g = DensityMeasure::gaussian(2);
  MeasureOptions mc;
  mc.method = MeasureOptions::Method::MonteCarlo;
  mc.samples = 400000;
  CHECK(measure_of(g, make_cube(2), mc) == doctest::Approx(gauss_square()).epsilon(1e-2));
  CHECK(measure_of(g, make_ball(2), mc) == doctest::Approx(2 * pi * (1 - std::exp(-0.5))).epsilon(1e-2));
}

TEST_CASE("structural checks") {
  CHECK(DensityMeasure::gaussian(3).verify().ok);
  CHECK(DensityMeasure::gaussian_radial(2).verify().ok);
  CHECK(DensityMeasure::truncated_lebesgue(2, 5.0).verify().ok);
  const auto shifted = DensityMeasure::unconditional(
      2, [](const Vector& x) { return 0.5 * (x(0) - 1) * (x(0) - 1) + 0.5 * x(1) * x(1); });
  const auto c = shifted.verify();
  CHECK_FALSE(c.ok);
  CHECK(c.failed == "unconditionality");
  const auto bumpy = DensityMeasure::unconditional(
      2, [](const Vector& x) { return -std::cos(3 * x(0)) + x.squaredNorm(); });
  CHECK(bumpy.verify().failed == "log-concavity");
  const auto increasing = DensityMeasure::rotation_invariant(2, [](double t) { return 1 + t; });
  CHECK(increasing.verify().failed == "monotonicity");
}

TEST_CASE("hypothesis violations are reported") {
  const auto g = DensityMeasure::gaussian(2);
  try {
    measure_product_check(g, make_regular_polygon(6, 1.0, 0.2));
    FAIL("expected HypothesisFail");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisFail);
  }
  PolytopeV tri({Vector::Unit(2, 0), Vector::Unit(2, 1), -Vector::Ones(2)});
  CHECK_THROWS_AS(measure_product_check(DensityMeasure::gaussian_radial(2), tri), Error);
}

TEST_CASE("measure product: ball equality and square") {
  const auto ball = measure_product_check(DensityMeasure::gaussian(2), make_ball(2));
  CHECK(ball.passed());
  CHECK(std::abs(ball.value("margin")) < 1e-3);

  const auto sq = measure_product_check(DensityMeasure::gaussian(2), make_cube(2));
  CHECK(sq.passed());
  CHECK(sq.value("product") == doctest::Approx(gauss_square() * gauss_diamond()).epsilon(1e-5));
  CHECK(sq.value("margin") > 0.0);
}

TEST_CASE("truncated lebesgue reduces to the volume product") {
  const auto r = measure_product_check(DensityMeasure::truncated_lebesgue(2, 10.0), make_cube(2));
  CHECK(r.passed());
  CHECK(r.value("product") == doctest::Approx(8.0).epsilon(1e-5));
  CHECK(r.value("bound") == doctest::Approx(pi * pi).epsilon(1e-6));
}

TEST_CASE("property: rotation-invariant product on symmetric hexagons") {
  const auto g = DensityMeasure::gaussian_radial(2);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto r = measure_product_check(g, random_hexagon(seed));
    CHECK(r.passed());
  }
}
