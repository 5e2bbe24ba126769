#include "santalo/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "santalo/error.hpp"

namespace santalo {

namespace {

double scale_of(const Eigen::MatrixXd& q) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < q.cols(); ++j) s = std::max(s, q.col(j).cwiseAbs().maxCoeff());
  return std::max(s, 1e-300);
}

struct LocalFacet {
  Vector normal;
  double offset;
  std::vector<std::size_t> members;  // positions into the local point list
};

std::vector<std::size_t> hull_2d_local(const Eigen::MatrixXd& q, double tol) {
  const auto m = static_cast<std::size_t>(q.cols());
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    return q(0, ia) < q(0, ib) || (q(0, ia) == q(0, ib) && q(1, ia) < q(1, ib));
  });
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const auto io = static_cast<Eigen::Index>(o);
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    return (q(0, ia) - q(0, io)) * (q(1, ib) - q(1, io)) -
           (q(1, ia) - q(1, io)) * (q(0, ib) - q(0, io));
  };
  std::vector<std::size_t> h(2 * m);
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], order[i]) <= tol) --k;
    h[k++] = order[i];
  }
  for (std::size_t i = m - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], order[i]) <= tol) --k;
    h[k++] = order[i];
  }
  h.resize(k > 1 ? k - 1 : k);
  return h;
}

// Incremental 3D hull on triangles, then coplanar triangles are merged and
// every point within tolerance of a merged plane is listed as a member.
std::vector<LocalFacet> facets_3d(const Eigen::MatrixXd& q, double tol) {
  const auto m = static_cast<std::size_t>(q.cols());
  auto pt = [&](std::size_t i) -> Eigen::Vector3d { return q.col(static_cast<Eigen::Index>(i)); };

  std::size_t i0 = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (pt(i).x() < pt(i0).x()) i0 = i;
  }
  std::size_t i1 = i0;
  for (std::size_t i = 0; i < m; ++i) {
    if ((pt(i) - pt(i0)).norm() > (pt(i1) - pt(i0)).norm()) i1 = i;
  }
  const Eigen::Vector3d d01 = (pt(i1) - pt(i0)).normalized();
  std::size_t i2 = i0;
  double best = -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = (pt(i) - pt(i0)).cross(d01).norm();
    if (v > best) {
      best = v;
      i2 = i;
    }
  }
  const Eigen::Vector3d n012 = (pt(i1) - pt(i0)).cross(pt(i2) - pt(i0)).normalized();
  std::size_t i3 = i0;
  best = -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = std::abs(n012.dot(pt(i) - pt(i0)));
    if (v > best) {
      best = v;
      i3 = i;
    }
  }
  const Eigen::Vector3d inner = 0.25 * (pt(i0) + pt(i1) + pt(i2) + pt(i3));

  struct Tri {
    std::array<std::size_t, 3> v;
    Eigen::Vector3d n;
    double off;
    bool alive;
  };
  std::vector<Tri> tris;
  auto add = [&](std::size_t a, std::size_t b, std::size_t c) {
    Eigen::Vector3d n = (pt(b) - pt(a)).cross(pt(c) - pt(a));
    if (n.dot(pt(a) - inner) < 0.0) {
      std::swap(b, c);
      n = -n;
    }
    n.normalize();
    tris.push_back({{a, b, c}, n, n.dot(pt(a)), true});
  };
  add(i0, i1, i2);
  add(i0, i1, i3);
  add(i0, i2, i3);
  add(i1, i2, i3);

  std::vector<std::size_t> visible;
  std::map<std::pair<std::size_t, std::size_t>, int> edges;
  for (std::size_t p = 0; p < m; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.clear();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (tris[t].alive && tris[t].n.dot(pt(p)) - tris[t].off > tol) visible.push_back(t);
    }
    if (visible.empty()) continue;
    edges.clear();
    for (auto t : visible) {
      tris[t].alive = false;
      for (int e = 0; e < 3; ++e) edges[{tris[t].v[e], tris[t].v[(e + 1) % 3]}] += 1;
    }
    for (const auto& [e, cnt] : edges) {
      if (!edges.contains({e.second, e.first})) add(e.first, e.second, p);
    }
  }

  std::vector<LocalFacet> out;
  std::set<std::vector<std::size_t>> seen;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < m; ++j) {
      if (std::abs(t.n.dot(pt(j)) - t.off) <= tol) members.push_back(j);
    }
    if (seen.insert(members).second) out.push_back({Vector(t.n), t.off, members});
  }
  return out;
}

std::vector<LocalFacet> local_facets(const Eigen::MatrixXd& q) {
  const auto d = static_cast<int>(q.rows());
  const auto m = static_cast<std::size_t>(q.cols());
  const double scale = scale_of(q);
  const double tol = 1e-10 * scale;
  std::vector<LocalFacet> out;

  if (d == 1) {
    Eigen::Index lo = 0;
    Eigen::Index hi = 0;
    q.row(0).minCoeff(&lo);
    q.row(0).maxCoeff(&hi);
    out.push_back({Vector::Constant(1, -1.0), -q(0, lo), {static_cast<std::size_t>(lo)}});
    out.push_back({Vector::Constant(1, 1.0), q(0, hi), {static_cast<std::size_t>(hi)}});
    return out;
  }
  if (d == 2) {
    const auto h = hull_2d_local(q, tol * scale);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vector a = q.col(static_cast<Eigen::Index>(h[i]));
      const Vector b = q.col(static_cast<Eigen::Index>(h[(i + 1) % h.size()]));
      Vector nrm(2);
      nrm << (b(1) - a(1)), -(b(0) - a(0));
      nrm.normalize();
      out.push_back({nrm, nrm.dot(a), {h[i], h[(i + 1) % h.size()]}});
    }
    return out;
  }
  if (d == 3) return facets_3d(q, tol);

  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> combo(static_cast<std::size_t>(d));
  std::iota(combo.begin(), combo.end(), std::size_t{0});
  Eigen::MatrixXd rows(d - 1, d);
  while (true) {
    const Vector base = q.col(static_cast<Eigen::Index>(combo[0]));
    for (int r = 1; r < d; ++r) {
      rows.row(r - 1) = (q.col(static_cast<Eigen::Index>(combo[r])) - base).transpose();
    }
    Vector nrm;
    bool ok = true;
    if (d == 3) {
      const Eigen::Vector3d a = rows.row(0).transpose();
      const Eigen::Vector3d b = rows.row(1).transpose();
      nrm = a.cross(b);
      ok = nrm.norm() > 1e-12 * a.norm() * b.norm() && nrm.norm() > 0;
    } else {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
      lu.setThreshold(1e-12);
      const Eigen::MatrixXd ker = lu.kernel();
      ok = ker.cols() == 1;
      if (ok) nrm = ker.col(0);
    }
    if (ok) {
      nrm.normalize();
      const double off = nrm.dot(base);
      bool above = false;
      bool below = false;
      std::vector<std::size_t> members;
      for (std::size_t j = 0; j < m && !(above && below); ++j) {
        const double s = nrm.dot(q.col(static_cast<Eigen::Index>(j))) - off;
        if (s > tol) above = true;
        else if (s < -tol) below = true;
        else members.push_back(j);
      }
      if (!(above && below) && (above || below)) {
        if (seen.insert(members).second) {
          if (above) out.push_back({-nrm, -off, members});
          else out.push_back({nrm, off, members});
        }
      }
    }
    // next combination
    int i = d - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == m - static_cast<std::size_t>(d - i)) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < d; ++j) {
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

Eigen::MatrixXd as_matrix(const std::vector<Vector>& pts) {
  Eigen::MatrixXd m(pts.front().size(), static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = pts[j];
  return m;
}

void pull(const Eigen::MatrixXd& all, const std::vector<std::size_t>& subset,
          std::vector<Simplex>& out, const Simplex& prefix) {
  const Vector origin = all.col(static_cast<Eigen::Index>(subset.front()));
  Eigen::MatrixXd diff(all.rows(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t j = 0; j < subset.size(); ++j) {
    diff.col(static_cast<Eigen::Index>(j)) = all.col(static_cast<Eigen::Index>(subset[j])) - origin;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diff);
  qr.setThreshold(1e-10);
  const auto d = qr.rank();
  if (d == 0) return;
  const Eigen::MatrixXd basis =
      Eigen::MatrixXd(qr.householderQ()).leftCols(d);
  const Eigen::MatrixXd q = basis.transpose() * diff;

  if (d == 1) {
    Eigen::Index lo = 0;
    Eigen::Index hi = 0;
    q.row(0).minCoeff(&lo);
    q.row(0).maxCoeff(&hi);
    Simplex s = prefix;
    s.push_back(subset[static_cast<std::size_t>(lo)]);
    s.push_back(subset[static_cast<std::size_t>(hi)]);
    out.push_back(std::move(s));
    return;
  }
  // Lexicographic minimum is a vertex.
  std::size_t apex = 0;
  for (std::size_t j = 1; j < subset.size(); ++j) {
    for (Eigen::Index r = 0; r < d; ++r) {
      const double a = q(r, static_cast<Eigen::Index>(j));
      const double b = q(r, static_cast<Eigen::Index>(apex));
      if (a < b) {
        apex = j;
        break;
      }
      if (a > b) break;
    }
  }
  Simplex next = prefix;
  next.push_back(subset[apex]);
  for (const auto& f : local_facets(q)) {
    if (std::find(f.members.begin(), f.members.end(), apex) != f.members.end()) continue;
    std::vector<std::size_t> sub;
    sub.reserve(f.members.size());
    for (auto j : f.members) sub.push_back(subset[j]);
    pull(all, sub, out, next);
  }
}

}  // namespace

int affine_dimension(const std::vector<Vector>& pts, double rel_tol) {
  if (pts.size() < 2) return 0;
  Eigen::MatrixXd diff(pts.front().size(), static_cast<Eigen::Index>(pts.size() - 1));
  double scale = 0.0;
  for (std::size_t j = 1; j < pts.size(); ++j) {
    diff.col(static_cast<Eigen::Index>(j - 1)) = pts[j] - pts[0];
    scale = std::max(scale, diff.col(static_cast<Eigen::Index>(j - 1)).norm());
  }
  if (scale == 0.0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diff / scale);
  qr.setThreshold(rel_tol);
  return static_cast<int>(qr.rank());
}

std::vector<Facet> hull_facets(const std::vector<Vector>& pts) {
  require(!pts.empty(), ErrorCode::DegenerateBody, "empty vertex set");
  const int n = static_cast<int>(pts.front().size());
  require(affine_dimension(pts) == n, ErrorCode::DegenerateBody,
          "vertex set is not full-dimensional");
  std::vector<Facet> out;
  for (auto& lf : local_facets(as_matrix(pts))) {
    out.push_back({std::move(lf.normal), lf.offset, std::move(lf.members)});
  }
  return out;
}

std::vector<Simplex> triangulate(const std::vector<Vector>& pts) {
  require(!pts.empty(), ErrorCode::DegenerateBody, "empty vertex set");
  const int n = static_cast<int>(pts.front().size());
  require(affine_dimension(pts) == n, ErrorCode::DegenerateBody,
          "vertex set is not full-dimensional");
  std::vector<std::size_t> all(pts.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<Simplex> out;
  pull(as_matrix(pts), all, out, {});
  return out;
}

std::vector<std::size_t> extreme_points(const std::vector<Vector>& pts) {
  std::set<std::size_t> used;
  for (const auto& s : triangulate(pts)) used.insert(s.begin(), s.end());
  return {used.begin(), used.end()};
}

Moments simplex_moments(const std::vector<Vector>& pts, const std::vector<Simplex>& simplices) {
  const auto n = pts.front().size();
  Moments m{0.0, Vector::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  double fact = 1.0;
  for (Eigen::Index k = 2; k <= n; ++k) fact *= static_cast<double>(k);
  Eigen::MatrixXd edges(n, n);
  for (const auto& s : simplices) {
    const Vector& v0 = pts[s[0]];
    for (Eigen::Index k = 1; k <= n; ++k) edges.col(k - 1) = pts[s[static_cast<std::size_t>(k)]] - v0;
    const double vol = std::abs(edges.determinant()) / fact;
    Vector sum = Vector::Zero(n);
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(n, n);
    for (auto i : s) {
      sum += pts[i];
      outer.noalias() += pts[i] * pts[i].transpose();
    }
    m.volume += vol;
    m.first += vol * sum / static_cast<double>(n + 1);
    m.second += vol / static_cast<double>((n + 1) * (n + 2)) * (outer + sum * sum.transpose());
  }
  return m;
}

std::vector<std::size_t> convex_hull_2d(const std::vector<Vector>& pts) {
  const Eigen::MatrixXd q = as_matrix(pts);
  return hull_2d_local(q, 1e-14 * scale_of(q) * scale_of(q));
}

}  // namespace santalo
