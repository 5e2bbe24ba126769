#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "santalo/error.hpp"
#include "santalo/geometry.hpp"
#include "santalo/hull.hpp"
#include "santalo/rng.hpp"

using namespace santalo;
using std::numbers::pi;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

PolytopeV triangle() { return PolytopeV({vec({0, 0}), vec({1, 0}), vec({0, 1})}); }

PolytopeV random_polygon(std::uint64_t seed, int count) {
  RngCursor rng{CounterRng(seed)};
  std::vector<Vector> pts;
  for (int i = 0; i < count; ++i) {
    const double t = 2 * pi * (i + 0.8 * rng.uniform()) / count;
    const double r = rng.uniform(0.5, 2.0);
    pts.push_back(vec({r * std::cos(t), r * std::sin(t)}));
  }
  std::vector<Vector> hull;
  for (auto i : convex_hull_2d(pts)) hull.push_back(pts[i]);
  return PolytopeV(hull);
}

}  // namespace

TEST_CASE("sphere grids are antipodal, unit and equally weighted") {
  for (int n : {1, 2, 3, 4}) {
    const auto g = SphereGrid::make(n, n == 4 ? 4096 : 0);
    double wsum = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      CHECK(std::abs(g->node(i).norm() - 1.0) < 1e-12);
      CHECK((g->node(i) + g->node(g->antipode(i))).norm() == 0.0);
      wsum += g->weight();
    }
    CHECK(std::abs(wsum - 1.0) < 1e-12);
  }
  CHECK(SphereGrid::make(2)->size() == 4096);
  CHECK(SphereGrid::make(3)->size() == 8192);
}

TEST_CASE("ball volume constants") {
  CHECK(ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ball_volume(2) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));
  CHECK(ball_volume(4) == doctest::Approx(pi * pi / 2.0).epsilon(1e-15));
}

TEST_CASE("support function") {
  CHECK(support(make_cube(2), vec({1, 0})) == 1.0);
  CHECK(support(triangle(), vec({1, 1})) == 1.0);
  const auto ball = make_ball(2);
  for (double t : {0.0, 0.3, 1.7, 4.0}) {
    CHECK(support(ball, vec({std::cos(t), std::sin(t)})) == doctest::Approx(1.0).epsilon(1e-6));
  }
  // positive homogeneity
  const auto sq = to_star(make_cube(2));
  const Vector u = vec({0.3, -0.8});
  CHECK(support(sq, 2.5 * u) == doctest::Approx(2.5 * support(sq, u)).epsilon(1e-14));
  CHECK_THROWS_AS(PolytopeV({}), Error);
}

TEST_CASE("support dominates the radial function on nodes") {
  const auto body = make_ellipsoid((Eigen::Matrix2d() << 2, 0.3, 0, 0.5).finished());
  for (std::size_t i = 0; i < body.grid().size(); i += 37) {
    CHECK(support(body, body.grid().node(i)) >= body.radial(i) - 1e-15);
  }
}

TEST_CASE("gauge") {
  CHECK(gauge(make_ball(2), vec({3, 4})) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(gauge(make_ball(2, 2.0), vec({3, 4})) == doctest::Approx(2.5).epsilon(1e-12));
  auto grid = SphereGrid::make(2, 64);
  std::vector<double> r(grid->size(), 1.0);
  r[0] = 2.0;  // node 0 is e_1
  CHECK(gauge(StarBody(grid, r), vec({3, 0})) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(gauge(make_ball(3), Vector::Zero(3)) == 0.0);

  const auto body = to_star(make_regular_polygon(7, 1.3, 0.2));
  const Vector x = vec({0.4, -0.25});
  for (double t : {0.5, 2.0, 17.0}) {
    CHECK(gauge(body, t * x) == doctest::Approx(t * gauge(body, x)).epsilon(1e-12));
  }
}

TEST_CASE("star volumes") {
  CHECK(volume_star(make_ball(2)) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(volume_star(make_ball(3, 2.0)) == doctest::Approx(32.0 * pi / 3.0).epsilon(1e-4));
  CHECK(std::abs(volume_star(to_star(make_cube(2))) - 4.0) < 1e-3);
  const auto body = to_star(make_regular_polygon(5));
  for (double t : {0.5, 3.0}) {
    CHECK(volume_star(body.scaled(t)) == doctest::Approx(t * t * volume_star(body)).epsilon(1e-10));
  }
}

TEST_CASE("exact polytope volumes") {
  CHECK(volume_polytope(make_cube(3)) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(volume_polytope(make_cross_polytope(3)) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(volume_polytope(make_cross_polytope(4)) == doctest::Approx(16.0 / 24.0).epsilon(1e-14));
  CHECK(volume_polytope(triangle()) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(volume_polytope(make_cube(4)) == doctest::Approx(16.0).epsilon(1e-14));
  // interior points are ignored
  auto pts = make_cube(3).vertices();
  pts.push_back(vec({0.1, 0.2, -0.3}));
  CHECK(volume_polytope(PolytopeV(pts)) == doctest::Approx(8.0).epsilon(1e-14));
  // degenerate
  CHECK_THROWS_AS(volume_polytope(PolytopeV({vec({0, 0}), vec({1, 1}), vec({2, 2})})), Error);
  try {
    volume_polytope(PolytopeV({vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0}), vec({1, 1, 0})}));
    FAIL("expected DegenerateBody");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateBody);
  }
}

TEST_CASE("star volume agrees with exact polygon area") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto poly = random_polygon(seed, 9);
    std::vector<oracle::Pt> pts;
    for (const auto& v : poly.vertices()) pts.emplace_back(v(0), v(1));
    const double exact = oracle::polygon_area(pts);
    CHECK(volume_polytope(poly) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(volume_star(to_star(poly)) == doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("centroids") {
  CHECK(centroid(make_cube(3)).norm() < 1e-14);
  const Vector g = centroid(triangle());
  CHECK(g(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(g(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const Vector a = vec({0.3, -0.2});
  CHECK((centroid(make_shifted_ball(a, 1.0)) - a).norm() < 1e-3);
  const Vector a3 = vec({0.2, 0.1, -0.3});
  CHECK((centroid(make_shifted_ball(a3, 1.0)) - a3).norm() < 1e-3);
  // antipodally symmetric bodies have centroid 0
  CHECK(centroid(make_ellipsoid((Eigen::Matrix2d() << 2, 1, 0, 0.5).finished())).norm() < 1e-10);
  CHECK(centroid(to_star(make_cube(3))).norm() < 1e-10);
  // polygon centroid vs star centroid
  const auto poly = random_polygon(5, 11);
  const Vector shift = centroid(poly);
  std::vector<Vector> moved;
  for (const auto& v : poly.vertices()) moved.push_back(v - shift);
  CHECK(centroid(to_star(PolytopeV(moved))).norm() < 1e-3);
}

TEST_CASE("second moments") {
  // integral of x1^2 over [-1,1]^2 is 4/3; over the unit disc pi/4
  const auto sq = second_moment(make_cube(2));
  CHECK(sq(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(std::abs(sq(0, 1)) < 1e-14);
  const auto disc = second_moment(make_ball(2));
  CHECK(disc(0, 0) == doctest::Approx(pi / 4.0).epsilon(1e-10));
}

TEST_CASE("convexity certificate") {
  CHECK(certify_convex(make_ball(2)));
  CHECK(certify_convex(make_ball(3)));
  CHECK(certify_convex(to_star(make_regular_polygon(6))));
  CHECK(certify_convex(make_ellipsoid((Eigen::Matrix3d() << 2, 0, 0, 0, 1, 0.3, 0, 0, 0.5).finished())));
  // union of two unit discs centered at (+-0.7, 0): the chord between the two
  // tops passes through (0, 1) where the radial function is sqrt(0.51)
  auto grid = SphereGrid::make(2);
  std::vector<double> r(grid->size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    double best = 0.0;
    for (double cx : {-0.7, 0.7}) {
      const double cu = cx * grid->node(i)(0);
      best = std::max(best, cu + std::sqrt(cu * cu - cx * cx + 1.0));
    }
    r[i] = best;
  }
  const auto check = check_convexity(StarBody(grid, r));
  CHECK_FALSE(check.convex);
  CHECK(check.worst_excess > 0.1);
}

TEST_CASE("symmetry predicates") {
  CHECK(is_centrally_symmetric(make_cube(3)));
  CHECK_FALSE(is_centrally_symmetric(ConvexBody(triangle())));
  CHECK(is_unconditional(make_cube(3)));
  CHECK(is_unconditional(ConvexBody(make_ball(2))));
  CHECK_FALSE(is_unconditional(ConvexBody(make_regular_polygon(6, 1.0, 0.3))));
  CHECK(is_centrally_symmetric(ConvexBody(to_star(make_regular_polygon(6, 1.0, 0.3)))));
  CHECK(is_unconditional(ConvexBody(make_ellipsoid((Eigen::Matrix3d() << 2, 0, 0, 0, 1, 0, 0, 0, 0.5).finished()))));
}
