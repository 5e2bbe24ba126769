#include "santalo/symmetrization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "santalo/error.hpp"
#include "santalo/geometry.hpp"
#include "santalo/hull.hpp"
#include "santalo/optimize.hpp"
#include "santalo/polar.hpp"

namespace santalo {

namespace {

std::vector<Vector> body_points(const ConvexBody& k) {
  if (const auto* p = std::get_if<PolytopeV>(&k)) return p->vertices();
  const auto& s = std::get<StarBody>(k);
  std::vector<Vector> pts;
  pts.reserve(s.grid().size() + s.extreme_points().size());
  for (std::size_t i = 0; i < s.grid().size(); ++i) pts.push_back(s.boundary_point(i));
  for (const auto& e : s.extreme_points()) pts.push_back(e);
  return pts;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd complement_basis(const Vector& u) {
  const auto n = u.size();
  const Eigen::MatrixXd um = u;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(um);
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - 1);
}

std::pair<double, double> facet_chord(const std::vector<Facet>& facets, const Vector& p, const Vector& u,
                                      double scale) {
  double lo = -kInf, hi = kInf;
  for (const auto& f : facets) {
    const double au = f.normal.dot(u);
    const double room = f.offset - f.normal.dot(p);
    if (au > 1e-14) {
      hi = std::min(hi, room / au);
    } else if (au < -1e-14) {
      lo = std::max(lo, room / au);
    } else if (room < -1e-12 * scale) {
      return {1.0, 0.0};
    }
  }
  return {lo, hi};
}

/// Endpoints of the chords of K over every point where the chord length can
/// kink: projected vertices and, in 3D, crossings of projected edges.
PolytopeV steiner_polytope(const PolytopeV& k, const Vector& u) {
  const int n = k.dim();
  const auto& verts = k.vertices();
  const auto facets = hull_facets(verts);
  const double scale = diameter(ConvexBody(k));
  std::vector<Vector> cand;
  for (const auto& v : verts) cand.push_back(v - v.dot(u) * u);
  if (n == 3) {
    const Eigen::MatrixXd b = complement_basis(u);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& f : facets) {
      const Eigen::MatrixXd fb = complement_basis(f.normal);
      std::vector<Vector> loc;
      for (auto i : f.vertices) loc.push_back(fb.transpose() * verts[i]);
      const auto ring = convex_hull_2d(loc);
      for (std::size_t j = 0; j < ring.size(); ++j) {
        auto a = f.vertices[ring[j]], c = f.vertices[ring[(j + 1) % ring.size()]];
        if (a > c) std::swap(a, c);
        edges.emplace_back(a, c);
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<Eigen::Vector2d> pa, pb;
    for (const auto& [a, c] : edges) {
      pa.push_back(b.transpose() * verts[a]);
      pb.push_back(b.transpose() * verts[c]);
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        const Eigen::Vector2d d1 = pb[i] - pa[i], d2 = pb[j] - pa[j], w = pa[j] - pa[i];
        const double den = d1.x() * d2.y() - d1.y() * d2.x();
        if (std::abs(den) < 1e-14 * d1.norm() * d2.norm()) continue;
        const double s = (w.x() * d2.y() - w.y() * d2.x()) / den;
        const double t = (w.x() * d1.y() - w.y() * d1.x()) / den;
        if (s <= 0.0 || s >= 1.0 || t <= 0.0 || t >= 1.0) continue;
        cand.push_back(b * (pa[i] + s * d1));
      }
    }
  }
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const Vector& p = cand[i];
    auto [lo, hi] = facet_chord(facets, p, u, scale);
    if (i < verts.size()) {
      // the vertex itself is on the chord; near-vertical facets can lose it
      const double t = verts[i].dot(u);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    } else if (!(hi >= lo - 1e-9 * scale)) {
      continue;
    }
    const double half = 0.5 * std::max(hi - lo, 0.0);
    pts.push_back(p + half * u);
    if (half > 0.0) pts.push_back(p - half * u);
  }
  std::vector<Vector> out;
  for (auto i : extreme_points(pts)) {
    const Vector& p = pts[i];
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Vector& q) {
      return (p - q).norm() <= 1e-10 * scale;
    });
    if (!dup) out.push_back(p);
  }
  return PolytopeV(std::move(out));
}

struct StarChord {
  const StarBody& k;
  Vector u;
  double diam;

  double g(const Vector& x) const { return gauge(k, x); }

  /// Chord [lo, hi]; when the line misses K, lo > hi and hi - lo is minus
  /// the gauge excess times the diameter, which keeps the length continuous.
  std::pair<double, double> operator()(const Vector& q) const {
    double tm = 0.0;
    double gm = g(q);
    if (gm > 1.0) {
      tm = golden_section([&](double t) { return g(q + t * u); }, -diam, diam, 1e-10 * diam);
      gm = g(q + tm * u);
      if (gm > 1.0) return {tm, tm - (gm - 1.0) * diam};
    }
    auto edge = [&](double sign) {
      auto f = [&](double t) { return g(q + (tm + sign * t) * u) - 1.0; };
      const double fa = f(0.0);
      if (fa >= 0.0) return tm;
      double b = diam;
      while (f(b) < 0.0) b *= 2.0;
      std::uintmax_t iters = 80;
      const auto r = boost::math::tools::toms748_solve(f, 0.0, b, boost::math::tools::eps_tolerance<double>(44), iters);
      return tm + sign * 0.5 * (r.first + r.second);
    };
    return {edge(-1.0), edge(1.0)};
  }
};

StarBody steiner_star(const StarBody& k, const Vector& u, int grid_size) {
  const int n = k.dim();
  const auto grid = grid_size > 0 && static_cast<std::size_t>(grid_size) != k.grid().size()
                        ? SphereGrid::make(n, grid_size)
                        : k.grid_ptr();
  const double diam = diameter(ConvexBody(k));
  const StarChord chord_of{k, u, diam};
  std::vector<double> r(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vector theta = grid->node(i);
    const double a = std::abs(theta.dot(u));
    const Vector p = theta - theta.dot(u) * u;
    auto f = [&](double s) {
      const auto [lo, hi] = chord_of(s * p);
      return 0.5 * (hi - lo) - s * a;
    };
    double hi = 1.5 * diam;
    while (f(hi) >= 0.0) hi *= 2.0;
    std::uintmax_t iters = 80;
    const auto root = boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(40), iters);
    r[i] = 0.5 * (root.first + root.second);
  }
  return StarBody(grid, std::move(r));
}

}  // namespace

std::pair<double, double> chord(const ConvexBody& k, const Vector& p, const Vector& u) {
  if (const auto* poly = std::get_if<PolytopeV>(&k)) {
    return facet_chord(hull_facets(poly->vertices()), p, u, diameter(k));
  }
  const auto& s = std::get<StarBody>(k);
  const auto c = StarChord{s, u, diameter(k)}(p);
  return c.second >= c.first ? c : std::pair{1.0, 0.0};
}

SteinerResult steiner_symmetrize(const ConvexBody& k, const Vector& u_in, int grid_size) {
  const int n = dim(k);
  require(u_in.size() == n && u_in.norm() > 0.0, ErrorCode::InvalidInput, "direction must be a nonzero vector of the body's dimension");
  const Vector u = u_in.normalized();
  const double before = volume(k);
  require(before > 0.0, ErrorCode::DegenerateBody, "body has zero volume");
  const auto* poly = std::get_if<PolytopeV>(&k);
  if (poly && n <= 3) {
    require(affine_dimension(poly->vertices()) == n, ErrorCode::DegenerateBody, "polytope is not full-dimensional");
    ConvexBody body = steiner_polytope(*poly, u);
    const double after = volume(body);
    return {std::move(body), u, before, after, true};
  }
  ConvexBody body = steiner_star(to_star(k, grid_size), u, grid_size);
  const double after = volume(body);
  return {std::move(body), u, before, after, false};
}

bool reflection_symmetric(const ConvexBody& k, const Vector& u_in, double tol) {
  const Vector u = u_in.normalized();
  auto reflect = [&](const Vector& x) -> Vector { return x - 2.0 * x.dot(u) * u; };
  if (const auto* p = std::get_if<PolytopeV>(&k)) {
    const auto facets = hull_facets(p->vertices());
    const double scale = diameter(k);
    for (const auto& v : p->vertices()) {
      const Vector w = reflect(v);
      for (const auto& f : facets) {
        if (f.normal.dot(w) > f.offset + tol * scale) return false;
      }
    }
    return true;
  }
  const auto& s = std::get<StarBody>(k);
  for (std::size_t i = 0; i < s.grid().size(); ++i) {
    if (gauge(s, reflect(s.boundary_point(i))) > 1.0 + tol) return false;
  }
  return true;
}

Report volume_product_monotonicity(const ConvexBody& k, const Vector& u, double tol, int grid_size) {
  Report rep("steiner-volume-product");
  if (!is_centrally_symmetric(k, 1e-6)) {
    throw Error(ErrorCode::HypothesisFail, "volume product monotonicity needs a centrally symmetric body");
  }
  const Vector zero = Vector::Zero(dim(k));
  const auto s = steiner_symmetrize(k, u, grid_size);
  const double before = volume_product(k, zero, grid_size);
  const double after = volume_product(s.body, zero, grid_size);
  rep.set("vp_before", before);
  rep.set("vp_after", after);
  rep.set("volume_before", s.volume_before);
  rep.set("volume_after", s.volume_after);
  rep.note("exact", s.exact);
  rep.check_ge("vp_nondecreasing", "Steiner-vp", after, before, tol);
  rep.check_near("volume_preserved", "Steiner-vp", s.volume_after, s.volume_before, s.exact ? 1e-6 : 1e-3);
  return rep;
}

EllipsoidTest ellipsoid_test(const ConvexBody& k, double tol, int grid_size) {
  const int n = dim(k);
  const double vol = volume(k);
  require(vol > 0.0, ErrorCode::DegenerateBody, "zero-volume body");
  const Vector c = centroid(k);
  const Eigen::MatrixXd m = (second_moment(k) - vol * c * c.transpose()) * ((n + 2.0) / vol);

  const int gsize = std::holds_alternative<StarBody>(k)
                        ? static_cast<int>(std::get<StarBody>(k).grid().size())
                        : grid_size;
  auto grid = SphereGrid::make(n, gsize);
  const auto h = support_on_grid(body_points(k), c, *grid);

  EllipsoidTest out;
  out.worst_direction = grid->node(0);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vector u = grid->node(i);
    const double h2 = h[i] * h[i];
    const double d = std::abs(h2 - u.dot(m * u)) / h2;
    if (d > out.defect) {
      out.defect = d;
      out.worst_direction = u;
    }
  }
  out.is_ellipsoid = out.defect < tol;
  return out;
}

Report ellipsoid_report(const ConvexBody& k, double tol, int grid_size) {
  const auto t = ellipsoid_test(k, tol, grid_size);
  Report rep("ellipsoid-test");
  rep.set("defect", t.defect);
  rep.set("threshold", tol);
  rep.note("ellipsoid", t.is_ellipsoid);
  rep.note("worst_direction", std::vector<double>(t.worst_direction.data(), t.worst_direction.data() + t.worst_direction.size()));
  return rep;
}

}  // namespace santalo
