#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "santalo/error.hpp"
#include "santalo/geometry.hpp"
#include "santalo/hull.hpp"
#include "santalo/polar.hpp"
#include "santalo/rng.hpp"
#include "santalo/symmetrization.hpp"

using namespace santalo;
using std::numbers::pi;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

PolytopeV symmetric_polygon(std::uint64_t seed, int half = 3) {
  RngCursor rng(CounterRng(seed, 21));
  std::vector<double> t;
  for (int k = 0; k < half; ++k) t.push_back(rng.uniform(0, pi));
  std::sort(t.begin(), t.end());
  std::vector<Vector> v;
  for (double a : t) {
    const double r = rng.uniform(0.5, 1.5);
    v.push_back(r * vec({std::cos(a), std::sin(a)}));
    v.push_back(-v.back());
  }
  std::vector<Vector> ext;
  for (auto i : extreme_points(v)) ext.push_back(v[i]);
  return PolytopeV(ext);
}

PolytopeV random_polytope_3d(std::uint64_t seed, int count = 12) {
  RngCursor rng(CounterRng(seed, 22));
  std::vector<Vector> v;
  for (int k = 0; k < count; ++k) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = rng.normal();
    v.push_back(x.normalized() * rng.uniform(0.7, 1.3) + vec({0.1, -0.05, 0.2}));
  }
  std::vector<Vector> ext;
  for (auto i : extreme_points(v)) ext.push_back(v[i]);
  return PolytopeV(ext);
}

Vector unit(std::uint64_t seed, int n) {
  RngCursor rng(CounterRng(seed, 23));
  Vector u(n);
  for (int i = 0; i < n; ++i) u(i) = rng.normal();
  return u.normalized();
}

// Inclusion both ways, tested on vertices against facets.
bool same_polytope(const PolytopeV& a, const PolytopeV& b, double tol) {
  auto inside = [&](const PolytopeV& p, const PolytopeV& q) {
    for (const auto& f : hull_facets(q.vertices())) {
      for (const auto& v : p.vertices()) {
        if (f.normal.dot(v) > f.offset + tol) return false;
      }
    }
    return true;
  };
  return inside(a, b) && inside(b, a);
}

}  // namespace

TEST_CASE("triangle symmetral") {
  const PolytopeV tri({vec({0, 0}), vec({1, 0}), vec({0, 1})});
  const auto s = steiner_symmetrize(tri, vec({0, 1}));
  CHECK(s.exact);
  const PolytopeV expect({vec({0, -0.5}), vec({0, 0.5}), vec({1, 0})});
  CHECK(same_polytope(std::get<PolytopeV>(s.body), expect, 1e-12));
  CHECK(s.volume_after == doctest::Approx(0.5).epsilon(1e-12));
  const auto c = chord(tri, vec({0.25, 0}), vec({0, 1}));
  CHECK(c.first == doctest::Approx(0.0));
  CHECK(c.second == doctest::Approx(0.75));
}

TEST_CASE("ball is fixed") {
  const auto b = make_ball(2, 1.0, 512);
  const auto s = steiner_symmetrize(b, unit(1, 2));
  const auto& r = std::get<StarBody>(s.body);
  for (double v : r.radial()) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  const auto b3 = make_ball(3, 2.0, 1024);
  const auto s3 = steiner_symmetrize(b3, unit(2, 3));
  for (double v : std::get<StarBody>(s3.body).radial()) CHECK(v == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("volume preservation and reflection symmetry") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto p2 = symmetric_polygon(seed, 4);
    const PolytopeV shifted([&] {
      std::vector<Vector> v;
      for (const auto& x : p2.vertices()) v.push_back(x + vec({0.2, -0.1}));
      return v;
    }());
    const Vector u2 = unit(seed, 2);
    const auto s2 = steiner_symmetrize(shifted, u2);
    CHECK(s2.volume_after == doctest::Approx(s2.volume_before).epsilon(1e-12));
    CHECK(reflection_symmetric(s2.body, u2, 1e-9));

    const auto p3 = random_polytope_3d(seed);
    const Vector u3 = unit(seed + 100, 3);
    const auto s3 = steiner_symmetrize(p3, u3);
    CHECK(s3.exact);
    CHECK(s3.volume_after == doctest::Approx(s3.volume_before).epsilon(1e-9));
    CHECK(reflection_symmetric(s3.body, u3, 1e-9));
  }
}

TEST_CASE("idempotence") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto p = random_polytope_3d(seed);
    const Vector u = unit(seed, 3);
    const auto once = std::get<PolytopeV>(steiner_symmetrize(p, u).body);
    const auto twice = std::get<PolytopeV>(steiner_symmetrize(once, u).body);
    CHECK(same_polytope(once, twice, 1e-9));
  }
  const auto sq = to_star(make_cube(2), 1024);
  const auto once = std::get<StarBody>(steiner_symmetrize(sq, unit(3, 2)).body);
  const auto twice = std::get<StarBody>(steiner_symmetrize(once, unit(3, 2)).body);
  for (std::size_t i = 0; i < once.grid().size(); ++i) {
    CHECK(twice.radial(i) == doctest::Approx(once.radial(i)).epsilon(1e-3));
  }
}

TEST_CASE("orthogonal support and moments are preserved") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = random_polytope_3d(seed);
    const Vector u = unit(seed, 3);
    const auto s = std::get<PolytopeV>(steiner_symmetrize(p, u).body);
    const Eigen::MatrixXd m0 = second_moment(p), m1 = second_moment(s);
    for (int k = 0; k < 4; ++k) {
      Vector v = unit(seed * 10 + k, 3);
      v = (v - v.dot(u) * u).normalized();
      CHECK(support(s, v) == doctest::Approx(support(p, v)).epsilon(1e-9));
      CHECK(v.dot(m1 * v) == doctest::Approx(v.dot(m0 * v)).epsilon(1e-9));
    }
  }
}

TEST_CASE("orthogonal symmetrizations give an unconditional body") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    ConvexBody k = random_polytope_3d(seed);
    const double vol = volume(k);
    for (int i = 0; i < 3; ++i) k = steiner_symmetrize(k, Vector::Unit(3, i)).body;
    CHECK(is_unconditional(k, 1e-6));
    CHECK(volume(k) == doctest::Approx(vol).epsilon(1e-9));
  }
  // a square turned by 30 degrees
  std::vector<Vector> v;
  for (int k = 0; k < 4; ++k) {
    const double t = pi / 6 + k * pi / 2;
    v.push_back(vec({std::cos(t), std::sin(t)}));
  }
  ConvexBody sq = PolytopeV(v);
  sq = steiner_symmetrize(sq, vec({1, 0})).body;
  sq = steiner_symmetrize(sq, vec({0, 1})).body;
  CHECK(is_unconditional(sq, 1e-6));
  CHECK(volume(sq) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("star path agrees with the exact path") {
  const PolytopeV p({vec({-0.5, -0.4}), vec({1.2, -0.3}), vec({0.1, 1.1}), vec({-0.6, 0.5})});
  const Vector u = unit(7, 2);
  const auto exact = steiner_symmetrize(p, u);
  const auto approx = steiner_symmetrize(to_star(p, 4096), u);
  CHECK_FALSE(approx.exact);
  const auto& s = std::get<StarBody>(approx.body);
  const auto& e = std::get<PolytopeV>(exact.body);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.grid().size(); ++i) {
    const Vector th = s.grid().node(i);
    worst = std::max(worst, std::abs(s.radial(i) * gauge(e, th) - 1.0));
  }
  CHECK(worst < 1e-3);
  CHECK(approx.volume_after == doctest::Approx(exact.volume_after).epsilon(1e-3));
}

TEST_CASE("volume product does not decrease") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto hex = symmetric_polygon(seed);
    const auto r = volume_product_monotonicity(hex, unit(seed, 2));
    CHECK(r.passed());
    CHECK(r.value("vp_after") >= r.value("vp_before") * (1 - 1e-12));
  }
  const auto sq = make_cube(2);
  const auto diag = volume_product_monotonicity(sq, vec({1, 1}));
  CHECK(diag.value("vp_after") == doctest::Approx(8.0).epsilon(1e-12));
  const auto tilt = volume_product_monotonicity(sq, vec({std::cos(pi / 6), std::sin(pi / 6)}));
  CHECK(tilt.passed());
  CHECK(tilt.value("vp_after") > 8.1);
  CHECK(tilt.value("vp_after") < pi * pi);

  const auto ball = volume_product_monotonicity(make_ball(2, 1.0, 1024), unit(4, 2));
  CHECK(ball.passed());
  CHECK(ball.value("vp_after") == doctest::Approx(pi * pi).epsilon(1e-3));

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto base = random_polytope_3d(seed, 8);
    std::vector<Vector> v;
    for (const auto& x : base.vertices()) {
      v.push_back(x - vec({0.1, -0.05, 0.2}));
      v.push_back(-(x - vec({0.1, -0.05, 0.2})));
    }
    std::vector<Vector> ext;
    for (auto i : extreme_points(v)) ext.push_back(v[i]);
    CHECK(volume_product_monotonicity(PolytopeV(ext), unit(seed, 3)).passed());
  }
  CHECK_THROWS_AS(volume_product_monotonicity(make_simplex(2), vec({1, 0})), Error);
}

TEST_CASE("ellipsoid characterization") {
  CHECK(ellipsoid_test(make_ball(2, 1.0)).is_ellipsoid);
  Eigen::MatrixXd t(2, 2);
  t << 2, 0, 0, 0.5;
  CHECK(ellipsoid_test(make_ellipsoid(t)).is_ellipsoid);
  const auto sq = ellipsoid_report(make_cube(2));
  // h^2 = 1 against (4 / 4) * 4/3 at u = e1
  CHECK(sq.value("defect") >= 1.0 / 3 - 1e-9);
  CHECK_FALSE(sq.extra()["ellipsoid"].get<bool>());
  CHECK(sq.assertions().empty());
}
