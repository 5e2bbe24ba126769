#include "santalo/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "santalo/error.hpp"
#include "santalo/hull.hpp"
#include "santalo/rng.hpp"

namespace santalo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double star_moment_factor(const StarBody& k) {
  const int n = k.dim();
  return n * ball_volume(n) * k.grid().weight();
}

}  // namespace

double support(const PolytopeV& k, const Vector& u) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : k.vertices()) best = std::max(best, v.dot(u));
  return best;
}

double support(const StarBody& k, const Vector& u) {
  const auto& nodes = k.grid().nodes();
  const Eigen::RowVectorXd dots = u.transpose() * nodes;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < dots.size(); ++i) {
    best = std::max(best, k.radial(static_cast<std::size_t>(i)) * dots(i));
  }
  for (const auto& p : k.extreme_points()) best = std::max(best, p.dot(u));
  return best;
}

double support(const ConvexBody& k, const Vector& u) {
  return std::visit([&](const auto& b) { return support(b, u); }, k);
}

std::vector<double> support_on_grid(const std::vector<Vector>& points, const Vector& shift,
                                    const SphereGrid& grid) {
  require(!points.empty(), ErrorCode::DegenerateBody, "support of an empty point set");
  const std::size_t m = grid.size();
  std::vector<double> h(m, -std::numeric_limits<double>::infinity());
  if (grid.dim() == 2 && points.size() > 8) {
    // Directions are in angular order; the maximizing hull vertex turns with them.
    std::vector<Vector> shifted;
    shifted.reserve(points.size());
    for (const auto& p : points) shifted.push_back(p - shift);
    const auto hull = convex_hull_2d(shifted);
    const std::size_t hs = hull.size();
    auto value = [&](std::size_t j, std::size_t node) {
      return shifted[hull[j % hs]].dot(grid.node(node));
    };
    std::size_t j = 0;
    for (std::size_t t = 1; t < hs; ++t) {
      if (value(t, 0) > value(j, 0)) j = t;
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t steps = 0;
      while (steps < hs && value(j + 1, i) >= value(j, i)) {
        ++j;
        ++steps;
      }
      j %= hs;
      h[i] = value(j, i);
    }
    return h;
  }
  Eigen::MatrixXd pts(grid.dim(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) pts.col(static_cast<Eigen::Index>(j)) = points[j] - shift;
  constexpr Eigen::Index block = 256;
  for (Eigen::Index start = 0; start < static_cast<Eigen::Index>(m); start += block) {
    const Eigen::Index len = std::min(block, static_cast<Eigen::Index>(m) - start);
    const Eigen::MatrixXd dots = grid.nodes().middleCols(start, len).transpose() * pts;
    for (Eigen::Index i = 0; i < len; ++i) h[static_cast<std::size_t>(start + i)] = dots.row(i).maxCoeff();
  }
  return h;
}

double gauge(const StarBody& k, const Vector& x) {
  const double len = x.norm();
  if (len == 0.0) return 0.0;
  return len / k.radial_at(x / len);
}

double gauge(const PolytopeV& k, const Vector& x) {
  double g = 0.0;
  for (const auto& f : hull_facets(k.vertices())) {
    require(f.offset > 0.0, ErrorCode::CenterOutside, "origin is not interior to the polytope");
    g = std::max(g, f.normal.dot(x) / f.offset);
  }
  return g;
}

double gauge(const ConvexBody& k, const Vector& x) {
  return std::visit([&](const auto& b) { return gauge(b, x); }, k);
}

double volume_star(const StarBody& k) {
  const int n = k.dim();
  double sum = 0.0;
  for (double r : k.radial()) sum += std::pow(r, n);
  return ball_volume(n) * k.grid().weight() * sum;
}

double volume_polytope(const PolytopeV& k) {
  require(k.dim() <= 4, ErrorCode::InvalidInput, "exact polytope volume supports n <= 4");
  return simplex_moments(k.vertices(), triangulate(k.vertices())).volume;
}

double volume(const ConvexBody& k) {
  return std::visit(overloaded{[](const PolytopeV& p) { return volume_polytope(p); },
                               [](const StarBody& s) { return volume_star(s); }},
                    k);
}

Vector centroid(const PolytopeV& k) {
  const auto m = simplex_moments(k.vertices(), triangulate(k.vertices()));
  require(m.volume > 0.0, ErrorCode::DegenerateBody, "zero-volume polytope");
  return m.first / m.volume;
}

Vector centroid(const StarBody& k) {
  const int n = k.dim();
  Vector acc = Vector::Zero(n);
  for (std::size_t i = 0; i < k.grid().size(); ++i) {
    acc += std::pow(k.radial(i), n + 1) * k.grid().node(i);
  }
  const double vol = volume_star(k);
  require(vol > 0.0, ErrorCode::DegenerateBody, "zero-volume star body");
  return star_moment_factor(k) / (n + 1) * acc / vol;
}

Vector centroid(const ConvexBody& k) {
  return std::visit([](const auto& b) { return centroid(b); }, k);
}

Eigen::MatrixXd second_moment(const PolytopeV& k) {
  return simplex_moments(k.vertices(), triangulate(k.vertices())).second;
}

Eigen::MatrixXd second_moment(const StarBody& k) {
  const int n = k.dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < k.grid().size(); ++i) {
    const auto u = k.grid().node(i);
    acc.noalias() += std::pow(k.radial(i), n + 2) * (u * u.transpose());
  }
  return star_moment_factor(k) / (n + 2) * acc;
}

Eigen::MatrixXd second_moment(const ConvexBody& k) {
  return std::visit([](const auto& b) { return second_moment(b); }, k);
}

double diameter(const ConvexBody& k) {
  return std::visit(overloaded{[](const PolytopeV& p) {
                                 double d = 0.0;
                                 const auto& v = p.vertices();
                                 for (std::size_t i = 0; i < v.size(); ++i) {
                                   for (std::size_t j = 0; j < i; ++j) d = std::max(d, (v[i] - v[j]).norm());
                                 }
                                 return d;
                               },
                               [](const StarBody& s) {
                                 double r = 0.0;
                                 for (double v : s.radial()) r = std::max(r, v);
                                 return 2.0 * r;
                               }},
                    k);
}

ConvexityCheck check_convexity(const StarBody& k, const ConvexityOptions& opts) {
  ConvexityCheck out;
  const std::size_t m = k.grid().size();
  const RngCursor rng0{CounterRng(opts.seed, 0xC0)};
  RngCursor rng = rng0;
  constexpr double lambdas[] = {0.25, 0.5, 0.75};
  for (std::size_t p = 0; p < opts.pairs; ++p) {
    const auto i = static_cast<std::size_t>(rng.bits() % m);
    const auto j = static_cast<std::size_t>(rng.bits() % m);
    if (i == j) continue;
    const Vector a = k.boundary_point(i);
    const Vector b = k.boundary_point(j);
    for (double lam : lambdas) {
      const Vector x = lam * a + (1.0 - lam) * b;
      const double len = x.norm();
      if (len < 1e-12 * (a.norm() + b.norm())) continue;
      const double excess = len / k.radial_upper(x / len) - 1.0;
      if (excess > out.worst_excess) {
        out.worst_excess = excess;
        out.witness_a = a;
        out.witness_b = b;
      }
    }
  }
  out.convex = out.worst_excess <= opts.tol;
  return out;
}

bool certify_convex(const StarBody& k, const ConvexityOptions& opts) {
  return check_convexity(k, opts).convex;
}

namespace {

bool star_matches(const StarBody& s, const Vector& flip, double tol) {
  const auto& grid = s.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector u = grid.node(i).cwiseProduct(flip);
    double lo = s.radial_at(u);
    double hi = lo;
    if (s.dim() >= 3) {
      // Nearest-node interpolation: allow the local spread of samples on both sides.
      const auto k = static_cast<std::size_t>(2 * s.dim());
      for (auto j : grid.nearest(u, k)) {
        lo = std::min(lo, s.radial(j));
        hi = std::max(hi, s.radial(j));
      }
      double own_lo = s.radial(i);
      double own_hi = own_lo;
      for (auto j : grid.nearest(grid.node(i), k)) {
        own_lo = std::min(own_lo, s.radial(j));
        own_hi = std::max(own_hi, s.radial(j));
      }
      lo -= own_hi - own_lo;
      hi += own_hi - own_lo;
    }
    const double r = s.radial(i);
    if (r < lo * (1.0 - tol) || r > hi * (1.0 + tol)) return false;
  }
  return true;
}

bool polytope_matches(const PolytopeV& p, const Vector& flip, double tol) {
  const auto facets = hull_facets(p.vertices());
  for (const auto& v : p.vertices()) {
    const Vector w = v.cwiseProduct(flip);
    for (const auto& f : facets) {
      if (f.normal.dot(w) > f.offset + tol * std::max(1.0, std::abs(f.offset))) return false;
    }
  }
  return true;
}

}  // namespace

bool is_centrally_symmetric(const ConvexBody& k, double tol) {
  const Vector flip = -Vector::Ones(dim(k));
  if (const auto* s = std::get_if<StarBody>(&k)) {
    for (std::size_t i = 0; i < s->grid().size(); ++i) {
      const double a = s->radial(i);
      const double b = s->radial(s->grid().antipode(i));
      if (std::abs(a - b) > tol * std::max(a, b)) return false;
    }
    return true;
  }
  return polytope_matches(std::get<PolytopeV>(k), flip, tol);
}

bool is_unconditional(const ConvexBody& k, double tol) {
  const int n = dim(k);
  for (int i = 0; i < n; ++i) {
    Vector flip = Vector::Ones(n);
    flip(i) = -1.0;
    const bool ok = std::visit(overloaded{[&](const PolytopeV& p) { return polytope_matches(p, flip, tol); },
                                          [&](const StarBody& s) { return star_matches(s, flip, tol); }},
                               k);
    if (!ok) return false;
  }
  return true;
}

}  // namespace santalo
