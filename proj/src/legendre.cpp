#include "santalo/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "santalo/error.hpp"
#include "santalo/optimize.hpp"

namespace santalo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::size_t product(const std::vector<std::size_t>& s, std::size_t from, std::size_t to) {
  std::size_t p = 1;
  for (std::size_t k = from; k < to; ++k) p *= s[k];
  return p;
}

std::size_t flat_index(const std::vector<std::size_t>& shape, const std::vector<std::size_t>& idx) {
  std::size_t f = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) f = f * shape[k] + idx[k];
  return f;
}

/// out[j] = max_i (x[i] * y[j] - c[i]), evaluated exactly as written so the
/// result matches a plain double loop bit for bit. The lower hull of
/// (x, c) plus a monotone pointer gives the argmax; near-ties within
/// rounding are then resolved by direct evaluation.
class Pass1D {
 public:
  void run(const std::vector<double>& x, const double* c, const std::vector<double>& y, double* out,
           int* arg) {
    const std::size_t n = x.size();
    hull_.clear();
    double cmax = 0.0;
    double xmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(c[i])) continue;
      cmax = std::max(cmax, std::abs(c[i]));
      xmax = std::max(xmax, std::abs(x[i]));
      while (hull_.size() >= 2) {
        const std::size_t a = hull_[hull_.size() - 2];
        const std::size_t b = hull_.back();
        const double cross = (x[b] - x[a]) * (c[i] - c[a]) - (c[b] - c[a]) * (x[i] - x[a]);
        if (cross > 0.0) break;
        hull_.pop_back();
      }
      hull_.push_back(i);
    }
    if (hull_.empty()) {
      for (std::size_t j = 0; j < y.size(); ++j) {
        out[j] = -kInf;
        arg[j] = -1;
      }
      return;
    }
    const std::size_t h = hull_.size();
    std::size_t p = 0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double yj = y[j];
      auto val = [&](std::size_t i) { return x[i] * yj - c[i]; };
      while (p + 1 < h && val(hull_[p + 1]) >= val(hull_[p])) ++p;
      double best = val(hull_[p]);
      std::size_t bi = hull_[p];
      const double tie = 64.0 * kEps * (cmax + xmax * std::abs(yj) + std::abs(best));
      auto consider = [&](std::size_t i) {
        const double v = val(i);
        if (v > best) {
          best = v;
          bi = i;
        }
        return v;
      };
      std::size_t pl = p;
      while (pl > 0 && val(hull_[pl - 1]) >= best - tie) consider(hull_[--pl]);
      std::size_t pr = p;
      while (pr + 1 < h && val(hull_[pr + 1]) >= best - tie) consider(hull_[++pr]);
      // Pruned points can only compete inside gaps whose chord reaches the top.
      const std::size_t qlo = pl > 0 ? pl - 1 : 0;
      const std::size_t qhi = std::min(pr, h >= 2 ? h - 2 : 0);
      for (std::size_t q = qlo; h >= 2 && q <= qhi; ++q) {
        const std::size_t l = hull_[q];
        const std::size_t r = hull_[q + 1];
        if (r - l < 2) continue;
        const double vl = val(l);
        const double vr = val(r);
        if (std::max(vl, vr) < best - tie) continue;
        const double slope = (vr - vl) / (x[r] - x[l]);
        if (vl >= vr) {
          for (std::size_t i = l + 1; i < r; ++i) {
            if (vl + (x[i] - x[l]) * slope < best - 2.0 * tie) break;
            if (std::isfinite(c[i])) consider(i);
          }
        } else {
          for (std::size_t i = r - 1; i > l; --i) {
            if (vr + (x[i] - x[r]) * slope < best - 2.0 * tie) break;
            if (std::isfinite(c[i])) consider(i);
          }
        }
      }
      out[j] = best;
      arg[j] = static_cast<int>(bi);
    }
  }

 private:
  std::vector<std::size_t> hull_;
};

std::vector<double> trapezoid_weights(const std::vector<double>& a) {
  const std::size_t n = a.size();
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (a[i + 1] - a[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

bool on_boundary(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape) {
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (shape[k] >= 3 && (idx[k] == 0 || idx[k] + 1 == shape[k])) return true;
  }
  return false;
}

double rho_at(const RhoKernel& rho, double t) { return std::isfinite(t) ? rho(t) : 0.0; }

struct DualSamples {
  std::vector<Vector> w;
  std::vector<double> weight;
  std::vector<double> value;  // L phi(w)
  std::size_t untrusted = 0;
};

DualSamples trusted_samples(const GridFn& phi, const Axes& dual_axes) {
  const auto conj = conjugate(phi, Vector::Zero(phi.dim()), dual_axes);
  const auto& fn = conj.fn;
  std::vector<std::vector<double>> wts;
  for (const auto& a : fn.axes) wts.push_back(trapezoid_weights(a));
  DualSamples s;
  s.untrusted = conj.untrusted;
  for (std::size_t f = 0; f < fn.size(); ++f) {
    if (!conj.trusted[f] || !std::isfinite(fn.values[f])) continue;
    const auto idx = fn.unravel(f);
    double w = 1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) w *= wts[k][idx[k]];
    s.w.push_back(fn.node(f));
    s.weight.push_back(w);
    s.value.push_back(fn.values[f]);
  }
  return s;
}

}  // namespace

std::vector<std::size_t> GridFn::shape() const {
  std::vector<std::size_t> s;
  for (const auto& a : axes) s.push_back(a.size());
  return s;
}

std::vector<std::size_t> GridFn::unravel(std::size_t flat) const {
  std::vector<std::size_t> idx(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    idx[k] = flat % axes[k].size();
    flat /= axes[k].size();
  }
  return idx;
}

Vector GridFn::node(std::size_t flat) const {
  const auto idx = unravel(flat);
  Vector x(dim());
  for (std::size_t k = 0; k < idx.size(); ++k) x(static_cast<Eigen::Index>(k)) = axes[k][idx[k]];
  return x;
}

void GridFn::validate() const {
  require(!axes.empty(), ErrorCode::InvalidInput, "grid function needs at least one axis");
  std::size_t total = 1;
  for (const auto& a : axes) {
    require(!a.empty(), ErrorCode::InvalidInput, "grid axis is empty");
    for (std::size_t i = 0; i < a.size(); ++i) {
      require(std::isfinite(a[i]), ErrorCode::InvalidInput, "grid axis has non-finite node");
      if (i > 0) require(a[i] > a[i - 1], ErrorCode::InvalidInput, "grid axis must be strictly increasing");
    }
    total *= a.size();
  }
  require(values.size() == total, ErrorCode::InvalidInput, "value count does not match grid shape");
  bool any = false;
  for (double v : values) {
    require(!std::isnan(v) && v != -kInf, ErrorCode::InvalidInput,
            "grid values must be finite or +inf");
    any = any || std::isfinite(v);
  }
  require(any, ErrorCode::EmptyDomain, "grid function is +inf everywhere");
}

GridFn GridFn::sample(Axes axes, const std::function<double(const Vector&)>& f) {
  GridFn g;
  g.axes = std::move(axes);
  std::size_t total = 1;
  for (const auto& a : g.axes) total *= a.size();
  g.values.resize(total);
  for (std::size_t i = 0; i < total; ++i) g.values[i] = f(g.node(i));
  return g;
}

std::vector<double> uniform_axis(double lo, double hi, std::size_t count) {
  require(count >= 1 && hi >= lo, ErrorCode::InvalidInput, "bad uniform axis");
  if (count == 1) return {0.5 * (lo + hi)};
  require(hi > lo, ErrorCode::InvalidInput, "uniform axis needs hi > lo");
  std::vector<double> a(count);
  for (std::size_t i = 0; i < count; ++i) {
    a[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return a;
}

Axes uniform_axes(int n, double lo, double hi, std::size_t count) {
  return Axes(static_cast<std::size_t>(n), uniform_axis(lo, hi, count));
}

Axes slope_axes(const GridFn& phi, double density) {
  require(density > 0.0, ErrorCode::InvalidInput, "dual density must be positive");
  phi.validate();
  const auto shape = phi.shape();
  const std::size_t n = shape.size();
  Axes out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t inner = product(shape, k + 1, n);
    double lo = kInf, hi = -kInf;
    for (std::size_t f = 0; f < phi.size(); ++f) {
      const std::size_t ik = (f / inner) % shape[k];
      if (ik + 1 >= shape[k]) continue;
      const double a = phi.values[f], b = phi.values[f + inner];
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      const double s = (b - a) / (phi.axes[k][ik + 1] - phi.axes[k][ik]);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (!std::isfinite(lo)) {
      lo = -1.0;
      hi = 1.0;
    }
    const auto m = static_cast<std::size_t>(std::max(2.0, std::round(density * static_cast<double>(shape[k]))));
    if (hi - lo <= 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)) || shape[k] < 2) {
      out.push_back({0.5 * (lo + hi)});
      continue;
    }
    out.push_back(uniform_axis(lo, hi, m));
  }
  return out;
}

Conjugate conjugate(const GridFn& phi, const Vector& z, const Axes& dual_axes) {
  phi.validate();
  const std::size_t n = phi.axes.size();
  require(static_cast<std::size_t>(z.size()) == n, ErrorCode::InvalidInput,
          "center dimension does not match grid");
  Axes dual = dual_axes.empty() ? slope_axes(phi) : dual_axes;
  require(dual.size() == n, ErrorCode::InvalidInput, "dual axes dimension does not match grid");
  GridFn probe{dual, {}};
  probe.values.assign(product(probe.shape(), 0, n), 0.0);
  probe.validate();

  std::vector<std::size_t> shape = phi.shape();
  std::vector<double> cur = phi.values;
  bool first = true;
  std::vector<std::vector<int>> args(n);
  std::vector<std::vector<std::size_t>> arg_shapes(n);
  Pass1D pass;
  for (std::size_t k = n; k-- > 0;) {
    std::vector<double> x(phi.axes[k]), y(dual[k]);
    const double zk = z(static_cast<Eigen::Index>(k));
    if (zk != 0.0) {
      for (double& v : x) v -= zk;
      for (double& v : y) v -= zk;
    }
    const std::size_t outer = product(shape, 0, k);
    const std::size_t inner = product(shape, k + 1, n);
    const std::size_t nk = shape[k], mk = y.size();
    std::vector<double> next(outer * mk * inner);
    std::vector<int> arg(next.size());
    std::vector<double> c(nk), o(mk);
    std::vector<int> a(mk);
    for (std::size_t ou = 0; ou < outer; ++ou) {
      for (std::size_t r = 0; r < inner; ++r) {
        for (std::size_t i = 0; i < nk; ++i) {
          const double v = cur[(ou * nk + i) * inner + r];
          c[i] = first ? v : -v;
        }
        pass.run(x, c.data(), y, o.data(), a.data());
        for (std::size_t j = 0; j < mk; ++j) {
          next[(ou * mk + j) * inner + r] = o[j];
          arg[(ou * mk + j) * inner + r] = a[j];
        }
      }
    }
    shape[k] = mk;
    cur = std::move(next);
    args[k] = std::move(arg);
    arg_shapes[k] = shape;
    first = false;
  }

  Conjugate out;
  out.fn.axes = dual;
  out.fn.values = std::move(cur);
  out.trusted.assign(out.fn.values.size(), 1);
  const auto primal = phi.shape();
  std::vector<std::size_t> idx(n);
  for (std::size_t f = 0; f < out.fn.values.size(); ++f) {
    const auto j = out.fn.unravel(f);
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      for (std::size_t t = k; t < n; ++t) idx[t] = j[t];
      const int ik = args[k][flat_index(arg_shapes[k], idx)];
      if (ik < 0) {
        ok = false;
        break;
      }
      idx[k] = static_cast<std::size_t>(ik);
      if (primal[k] >= 3 && (idx[k] == 0 || idx[k] + 1 == primal[k])) ok = false;
    }
    if (!ok) {
      out.trusted[f] = 0;
      ++out.untrusted;
    }
  }
  return out;
}

GridFn legendre_transform(const GridFn& phi, const Vector& z, const Axes& dual_axes) {
  return conjugate(phi, z, dual_axes).fn;
}

GridIntegral integrate_rho(const GridFn& f, const RhoKernel& rho, const std::vector<char>* mask) {
  const auto shape = f.shape();
  const std::size_t n = shape.size();
  std::vector<std::vector<double>> fine, coarse;
  for (const auto& a : f.axes) {
    fine.push_back(trapezoid_weights(a));
    std::vector<double> sub;
    for (std::size_t i = 0; i < a.size(); i += 2) sub.push_back(a[i]);
    const auto w = trapezoid_weights(sub);
    std::vector<double> full(a.size(), 0.0);
    for (std::size_t i = 0; i < sub.size(); ++i) full[2 * i] = w[i];
    coarse.push_back(full);
  }
  GridIntegral out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = rho_at(rho, f.values[i]);
    if (r == 0.0) continue;
    const auto idx = f.unravel(i);
    double wf = 1.0, wc = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      wf *= fine[k][idx[k]];
      wc *= coarse[k][idx[k]];
    }
    if (mask && !(*mask)[i]) {
      out.excluded_mass += wf * r;
      continue;
    }
    out.value += wf * r;
    out.coarse += wc * r;
  }
  out.error_estimate = std::abs(out.value - out.coarse) / 3.0;
  return out;
}

Report biconjugate_check(const GridFn& phi, const Vector& z, const BiconjugateOptions& opts) {
  Report rep("biconjugate");
  const Axes dual = opts.dual_axes.empty() ? slope_axes(phi) : opts.dual_axes;
  const auto l = conjugate(phi, z, dual);
  const auto ll = conjugate(l.fn, z, phi.axes);
  const auto shape = phi.shape();
  const std::size_t n = shape.size();

  double slack = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    auto spacing = [](const std::vector<double>& a) {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < a.size(); ++i) s = std::max(s, a[i + 1] - a[i]);
      return s;
    };
    slack += spacing(phi.axes[k]) * spacing(dual[k]);
  }
  for (double v : phi.values) {
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  }
  slack = opts.slack_factor * slack + 1e-12 * (1.0 + scale);

  // Nodes where phi meets its convex envelope: exact lower hull in 1D, a
  // local convexity certificate over all neighbours otherwise.
  std::vector<char> envelope(phi.size(), 0);
  if (n == 1) {
    const auto& x = phi.axes[0];
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double ci = phi.values[i];
      if (!std::isfinite(ci)) continue;
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2], b = hull.back();
        const double cross = (x[b] - x[a]) * (ci - phi.values[a]) - (phi.values[b] - phi.values[a]) * (x[i] - x[a]);
        if (cross > 0.0) break;
        hull.pop_back();
      }
      hull.push_back(i);
    }
    for (std::size_t q = 0; q < hull.size(); ++q) {
      envelope[hull[q]] = 1;
      if (q + 1 == hull.size()) break;
      const std::size_t a = hull[q], b = hull[q + 1];
      for (std::size_t i = a + 1; i < b; ++i) {
        if (!std::isfinite(phi.values[i])) continue;
        const double chord = phi.values[a] + (x[i] - x[a]) * (phi.values[b] - phi.values[a]) / (x[b] - x[a]);
        if (phi.values[i] <= chord + 1e-12 * (1.0 + scale)) envelope[i] = 1;
      }
    }
  } else {
    bool convex = true;
    const std::size_t dirs = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(n)));
    for (std::size_t f = 0; f < phi.size() && convex; ++f) {
      if (!std::isfinite(phi.values[f])) continue;
      const auto idx = phi.unravel(f);
      for (std::size_t d = 0; d < dirs && convex; ++d) {
        std::size_t code = d;
        std::vector<std::size_t> fw(idx), bw(idx);
        bool inside = true, zero = true;
        for (std::size_t k = n; k-- > 0;) {
          const int step = static_cast<int>(code % 3) - 1;
          code /= 3;
          if (step != 0) zero = false;
          const long a = static_cast<long>(idx[k]) + step, b = static_cast<long>(idx[k]) - step;
          if (a < 0 || b < 0 || a >= static_cast<long>(shape[k]) || b >= static_cast<long>(shape[k])) {
            inside = false;
            break;
          }
          fw[k] = static_cast<std::size_t>(a);
          bw[k] = static_cast<std::size_t>(b);
        }
        if (!inside || zero) continue;
        const double va = phi.values[flat_index(shape, fw)], vb = phi.values[flat_index(shape, bw)];
        if (!std::isfinite(va) || !std::isfinite(vb)) continue;
        // non-uniform axes: compare against linear interpolation
        double ta = 0.0, tb = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (fw[k] == idx[k]) continue;
          const double da = std::abs(phi.axes[k][fw[k]] - phi.axes[k][idx[k]]);
          const double db = std::abs(phi.axes[k][bw[k]] - phi.axes[k][idx[k]]);
          ta = std::max(ta, da);
          tb = std::max(tb, db);
        }
        const double interp = (tb * va + ta * vb) / (ta + tb);
        if (interp < phi.values[f] - 1e-12 * (1.0 + scale)) convex = false;
      }
    }
    if (convex) {
      for (std::size_t f = 0; f < phi.size(); ++f) envelope[f] = std::isfinite(phi.values[f]) ? 1 : 0;
    } else {
      rep.warn("input is not locally convex; envelope equality not asserted in dimension >= 2");
    }
  }

  double above = -kInf, defect = 0.0, env_defect = 0.0, interior_defect = 0.0;
  std::size_t worst = 0, env_nodes = 0;
  for (std::size_t f = 0; f < phi.size(); ++f) {
    const double v = phi.values[f];
    if (!std::isfinite(v)) continue;
    const double d = v - ll.fn.values[f];
    above = std::max(above, -d);
    if (d > defect) {
      defect = d;
      worst = f;
    }
    if (envelope[f]) {
      ++env_nodes;
      env_defect = std::max(env_defect, std::abs(d));
      if (!on_boundary(phi.unravel(f), shape)) interior_defect = std::max(interior_defect, std::abs(d));
    }
  }
  rep.set("slack", slack);
  rep.set("max_defect", defect);
  rep.set("envelope_defect", env_defect);
  rep.set("interior_defect", interior_defect);
  rep.set("envelope_nodes", static_cast<double>(env_nodes));
  rep.set("untrusted_dual_nodes", static_cast<double>(l.untrusted));
  const Vector w = phi.node(worst);
  rep.note("worst_node", std::vector<double>(w.data(), w.data() + w.size()));
  rep.check_le_abs("biconjugate_below", "L-involution", std::max(above, 0.0), 0.0, slack);
  if (env_nodes > 0) rep.check_le_abs("envelope_recovered", "L-involution", env_defect, 0.0, slack);
  return rep;
}

CenterSolveResult optimal_center(const GridFn& phi, const RhoKernel& rho, const CenterSolveOptions& opts) {
  phi.validate();
  const int n = phi.dim();
  const auto s = trusted_samples(phi, opts.dual_axes);
  require(!s.w.empty(), ErrorCode::EmptyDomain, "no trusted dual nodes");
  const std::size_t m = s.w.size();

  auto objective = [&](const Vector& z) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += s.weight[i] * rho_at(rho, s.value[i] - z.dot(s.w[i]));
    return acc;
  };
  // gradient is -sum rho'(.) w; the ratio below is the fixed-point defect
  auto moments = [&](const Vector& z, Vector& first, double& zeroth) {
    first = Vector::Zero(n);
    zeroth = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = s.weight[i] * rho.derivative(s.value[i] - z.dot(s.w[i]));
      first += d * s.w[i];
      zeroth += d;
    }
  };

  Vector start = Vector::Zero(n);
  if (opts.start) {
    start = *opts.start;
  } else {
    double mass = 0.0;
    Vector bary = Vector::Zero(n);
    for (std::size_t f = 0; f < phi.size(); ++f) {
      const double r = rho_at(rho, phi.values[f]);
      if (r == 0.0) continue;
      mass += r;
      bary += r * phi.node(f);
    }
    if (mass > 0.0) start = bary / mass;
  }
  double extent = 0.0;
  for (const auto& a : phi.axes) extent = std::max(extent, a.back() - a.front());

  NelderMeadOptions nm;
  nm.initial_step = 0.02 * std::max(extent, 1e-6);
  nm.max_evals = 4000;
  auto res = nelder_mead([&](const Vector& z) { return std::log(objective(z)); }, start, nm);
  Vector z = res.x;
  CenterSolveResult out;
  out.evaluations = res.evals;
  out.nonunique_possible = !rho.strictly_convex();

  Vector first;
  double zeroth = 0.0;
  moments(z, first, zeroth);
  if (rho.family() != RhoKernel::Family::Indicator && zeroth != 0.0) {
    // Newton polish on the stationarity condition with a finite-difference Jacobian.
    for (int it = 0; it < 8 && first.norm() / std::abs(zeroth) > 1e-3 * opts.tol; ++it) {
      Eigen::MatrixXd jac(n, n);
      const double hstep = 1e-6 * (1.0 + z.norm());
      for (int k = 0; k < n; ++k) {
        Vector zp = z, zm = z, fp, fm;
        double d0;
        zp(k) += hstep;
        zm(k) -= hstep;
        moments(zp, fp, d0);
        moments(zm, fm, d0);
        jac.col(k) = (fp - fm) / (2.0 * hstep);
      }
      const Vector step = jac.fullPivLu().solve(-first);
      if (!step.allFinite()) break;
      const double base = objective(z);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 20; ++ls, t *= 0.5) {
        const Vector cand = z + t * step;
        Vector fc;
        double dc;
        moments(cand, fc, dc);
        if (objective(cand) <= base * (1.0 + 1e-14) && fc.norm() < first.norm()) {
          z = cand;
          first = fc;
          zeroth = dc;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  out.z0 = z;
  out.objective = objective(z);
  out.residual = zeroth != 0.0 ? first.norm() / std::abs(zeroth) : 0.0;
  if (zeroth == 0.0) out.nonunique_possible = true;
  if (rho.strictly_convex() && !(out.residual <= opts.tol)) {
    throw SolverError("optimal center fixed-point residual above tolerance", z, out.residual);
  }
  return out;
}

bool numerically_exponential(const RhoKernel& rho, double lo, double hi) {
  if (!(hi > lo)) return false;
  constexpr int samples = 200;
  std::vector<double> lg(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    lg[static_cast<std::size_t>(i)] = rho.log(lo + (hi - lo) * i / samples);
    if (!std::isfinite(lg[static_cast<std::size_t>(i)])) return false;
  }
  for (std::size_t i = 1; i < lg.size() - 1; ++i) {
    const double second = lg[i + 1] - 2.0 * lg[i] + lg[i - 1];
    if (std::abs(second) > 1e-9 * (1.0 + std::abs(lg[i]))) return false;
  }
  return true;
}

Report equality_diagnostics(const GridFn& phi, const RhoKernel& rho, const Vector& z) {
  phi.validate();
  Report rep("equality-diagnostics");
  const int n = phi.dim();
  const int nq = n * (n + 1) / 2;
  std::vector<std::size_t> rows;
  for (std::size_t f = 0; f < phi.size(); ++f) {
    if (std::isfinite(phi.values[f]) && rho_at(rho, phi.values[f]) > 0.0) rows.push_back(f);
  }
  require(rows.size() > static_cast<std::size_t>(nq + 1), ErrorCode::EmptyDomain,
          "too few weighted nodes for a quadratic fit");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), nq + 1);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  double norm = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const double v = phi.values[rows[r]];
    const double sw = std::sqrt(rho(v));
    const Vector d = phi.node(rows[r]) - z;
    int col = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) a(ri, col++) = sw * (i == j ? 0.5 * d(i) * d(i) : d(i) * d(j));
    }
    a(ri, nq) = sw;
    b(ri) = sw * v;
    norm += sw * sw * v * v;
  }
  const Eigen::VectorXd p = a.colPivHouseholderQr().solve(b);
  const double resid = (a * p - b).norm() / std::max(std::sqrt(norm), 1e-300);
  Eigen::MatrixXd quad(n, n);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) quad(i, j) = quad(j, i) = p(col++);
  }
  const double c = p(nq);
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(quad).eigenvalues().minCoeff();
  const double hi = std::isfinite(rho.support_hint()) ? rho.support_hint() : 40.0;
  const bool exponential = std::isinf(rho.zero_from()) && numerically_exponential(rho, -std::abs(c) - 1.0, hi);
  const bool c_zero = std::abs(c) <= 1e-6 * (1.0 + quad.norm());
  const bool form = resid <= 1e-3 && min_eig > 0.0 && (c_zero || exponential);

  rep.set("fit_residual", resid);
  rep.set("c", c);
  rep.set("min_eigenvalue", min_eig);
  rep.set("rho_exponential", exponential ? 1.0 : 0.0);
  nlohmann::json m = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < n; ++j) row.push_back(quad(i, j));
    m.push_back(row);
  }
  rep.note("TtT", m);
  rep.note("equality_form", form);
  if (!c_zero && !exponential) rep.warn("constant offset c is nonzero while rho is not exponential");
  return rep;
}

Report legendre_santalo_verify(const GridFn& phi, const RhoKernel& rho, const LegendreOptions& opts) {
  phi.validate();
  Report rep("legendre-santalo");
  if (!rho.log_concave() || !rho.non_increasing()) {
    throw Error(ErrorCode::HypothesisFail, "rho must be log-concave and non-increasing");
  }
  const auto flags = rho.verify();
  if (!flags.ok) throw Error(ErrorCode::HypothesisFail, "rho flag check failed: " + flags.failed);
  const int n = phi.dim();

  const auto i0 = integrate_rho(phi, rho);
  require(i0.value > 0.0 && std::isfinite(i0.value), ErrorCode::HypothesisFail,
          "integral of rho(phi) must be positive and finite");
  {
    const auto shape = phi.shape();
    double edge = 0.0, top = 0.0;
    for (std::size_t f = 0; f < phi.size(); ++f) {
      const double r = rho_at(rho, phi.values[f]);
      top = std::max(top, r);
      if (on_boundary(phi.unravel(f), shape)) edge = std::max(edge, r);
    }
    rep.set("primal_edge_ratio", top > 0.0 ? edge / top : 0.0);
    if (edge > 1e-8 * top) rep.warn("primal grid truncates rho(phi)");
  }

  Vector z;
  if (opts.z) {
    z = *opts.z;
  } else {
    const auto c = optimal_center(phi, rho, opts.center);
    z = c.z0;
    rep.set("center_residual", c.residual);
    if (c.nonunique_possible) rep.warn("nonunique_possible");
  }
  const auto s = trusted_samples(phi, opts.center.dual_axes);
  double i1 = 0.0, excluded = 0.0;
  for (std::size_t i = 0; i < s.w.size(); ++i) i1 += s.weight[i] * rho_at(rho, s.value[i] - z.dot(s.w[i]));
  {
    // mass the untrusted nodes would have carried, as a correction bound
    const auto conj = conjugate(phi, Vector::Zero(n), opts.center.dual_axes);
    std::vector<std::vector<double>> wts;
    for (const auto& a : conj.fn.axes) wts.push_back(trapezoid_weights(a));
    for (std::size_t f = 0; f < conj.fn.size(); ++f) {
      if (conj.trusted[f]) continue;
      const auto idx = conj.fn.unravel(f);
      double wt = 1.0;
      for (std::size_t k = 0; k < idx.size(); ++k) wt *= wts[k][idx[k]];
      excluded += wt * rho_at(rho, conj.fn.values[f] - z.dot(conj.fn.node(f)));
    }
  }
  if (s.untrusted > 0) rep.warn("untrusted dual nodes excluded: " + std::to_string(s.untrusted));

  const auto kc = c_n_rho(rho, n);
  const double gauss = std::pow(2.0, 0.5 * n) * kc.full_integral;
  const double lhs = i0.value * i1;
  const double rhs = gauss * gauss;
  rep.set("integral_rho_phi", i0.value);
  rep.set("integral_rho_phi_error", i0.error_estimate);
  rep.set("integral_rho_dual", i1);
  rep.set("excluded_mass_bound", excluded);
  rep.set("untrusted_dual_nodes", static_cast<double>(s.untrusted));
  rep.set("product", lhs);
  rep.set("bound", rhs);
  rep.set("margin", relative_margin(lhs, rhs));
  rep.note("z", std::vector<double>(z.data(), z.data() + z.size()));
  rep.check_le("legendre_product", "Thm5.1", lhs, rhs, opts.tol);

  if (std::abs(relative_margin(lhs, rhs)) <= opts.equality_band) {
    const auto eq = equality_diagnostics(phi, rho, z);
    rep.absorb(eq, "equality.");
    if (!eq.extra().value("equality_form", false))
      rep.warn("near equality but phi does not fit the equality family");
  }
  return rep;
}

}  // namespace santalo
