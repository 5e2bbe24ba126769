#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "santalo/fuzz.hpp"

using namespace santalo;
using std::numbers::pi;

namespace {

std::string dump(const Report& r) { return to_json(r, false).dump(); }

}  // namespace

TEST_CASE("every family is known") {
  for (const auto& name : fuzz_families()) {
    FuzzOptions o;
    o.count = name == "logconcave-functions" || name == "rho-kernels" ? 2 : 6;
    o.seed = 3;
    const auto r = fuzz(name, o);
    CAPTURE(name);
    CHECK(r.value("cases") == static_cast<double>(o.count));
    CHECK(r.value("errors") == 0.0);
    CHECK(r.passed());
  }
}

TEST_CASE("same seed gives the same report, whatever the thread count") {
  FuzzOptions a;
  a.count = 40;
  a.seed = 19;
  a.threads = 1;
  FuzzOptions b = a;
  b.threads = 3;
  CHECK(dump(fuzz("convex-bodies", a)) == dump(fuzz("convex-bodies", b)));
  FuzzOptions c = a;
  c.seed = 20;
  CHECK(dump(fuzz("convex-bodies", a)) != dump(fuzz("convex-bodies", c)));
}

TEST_CASE("symmetric polygons stay below pi squared") {
  FuzzOptions o;
  o.count = 200;
  o.seed = 7;
  const auto r = fuzz("polygons", o);
  CHECK(r.value("violations") == 0.0);
  CHECK(r.value("worst_margin") >= 0.0);
}

TEST_CASE("shrinking walks a violation back to the canonical instance") {
  // A negative tolerance demands a margin of 20%; no symmetric hexagon has
  // one, so every halving keeps violating and the shrink ends at the
  // regular hexagon itself, vp = 9.
  FuzzOptions o;
  o.count = 30;
  o.seed = 5;
  o.tol = -0.2;
  const auto r = fuzz("polygons", o);
  CHECK(r.value("violations") == 30.0);
  CHECK_FALSE(r.passed());
  const auto& ce = r.extra()["counterexample"];
  CHECK(ce["halvings"].get<int>() == o.shrink_steps);
  CHECK(ce["margin"].get<double>() == doctest::Approx(1.0 - 9.0 / (pi * pi)).epsilon(1e-9));
  for (double x : ce["perturbation"].get<std::vector<double>>()) CHECK(std::abs(x) < 1e-10);
}

TEST_CASE("unknown family is an input error") { CHECK_THROWS(fuzz("spheres")); }
