#include "santalo/fuzz.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "santalo/error.hpp"
#include "santalo/geometry.hpp"
#include "santalo/hull.hpp"
#include "santalo/legendre.hpp"
#include "santalo/logconcave.hpp"
#include "santalo/measure.hpp"
#include "santalo/polar.hpp"
#include "santalo/rng.hpp"
#include "santalo/serialize.hpp"

namespace santalo {

namespace {

using std::numbers::pi;
using Delta = std::vector<double>;

struct Outcome {
  double margin = 0.0;
  bool passed = true;
  Json instance;
  std::vector<std::string> failed;  // names of failing side checks
};

struct Family {
  std::string tag;
  int variants = 1;
  std::function<std::size_t(int)> size;  // perturbation length per variant
  std::function<Outcome(int, const Delta&, const FuzzOptions&)> run;
};

PolytopeV hull_of(const std::vector<Vector>& pts) {
  std::vector<Vector> ext;
  for (auto i : extreme_points(pts)) ext.push_back(pts[i]);
  return PolytopeV(std::move(ext));
}

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Centrally symmetric hexagon around the regular one.
PolytopeV symmetric_hexagon(const Delta& d, std::size_t off = 0) {
  std::vector<Vector> pts;
  for (int k = 0; k < 3; ++k) {
    const double t = k * pi / 3 + 0.45 * (pi / 3) * d[off + k];
    const double r = std::exp(0.6 * d[off + 3 + k]);
    pts.push_back(r * v2(std::cos(t), std::sin(t)));
    pts.push_back(-pts.back());
  }
  return hull_of(pts);
}

// Centrally symmetric octahedron around the cross-polytope; 0.25 keeps the
// three generators independent.
PolytopeV symmetric_octahedron(const Delta& d) {
  std::vector<Vector> pts;
  for (int i = 0; i < 3; ++i) {
    Vector p = Vector::Unit(3, i);
    for (int j = 0; j < 3; ++j) p(j) += 0.25 * d[3 * i + j];
    pts.push_back(p);
    pts.push_back(-p);
  }
  return hull_of(pts);
}

Eigen::MatrixXd near_identity(const Delta& d, std::size_t off, int n, double amp) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) += amp * d[off + i * n + j] / n;
  }
  return t;
}

Vector slice(const Delta& d, std::size_t off, int n, double amp) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = amp * d[off + i];
  return v;
}

Outcome from_report(const Report& r, Json instance) {
  Outcome o{r.value("margin"), r.passed(), std::move(instance), {}};
  for (const auto& a : r.assertions()) {
    if (!a.pass) o.failed.push_back(a.name);
  }
  return o;
}

Family symmetric_polytopes(bool plane_only) {
  return {"BS-ineq", plane_only ? 1 : 2, [](int v) -> std::size_t { return v == 0 ? 6 : 9; },
          [](int v, const Delta& d, const FuzzOptions&) {
            const PolytopeV k = v == 0 ? symmetric_hexagon(d) : symmetric_octahedron(d);
            const int n = k.dim();
            Report r;
            const double vp = volume_product(k, Vector::Zero(n));
            const double bound = std::pow(ball_volume(n), 2);
            r.set("margin", relative_margin(vp, bound));
            r.check_le("volume product <= v_n^2", "BS-ineq", vp, bound, 1e-2);
            return from_report(r, {{"body", body_to_json(k)}});
          }};
}

Family convex_bodies() {
  return {"BS-ineq", 3,
          [](int v) -> std::size_t { return v == 0 ? 12 : v == 1 ? 21 : 4; },
          [](int v, const Delta& d, const FuzzOptions& o) {
            ConvexBody k = make_ball(2, 1.0, o.grid_size);
            if (v == 0) {
              std::vector<Vector> pts;
              const Vector shift = slice(d, 10, 2, 1.0);
              for (int j = 0; j < 5; ++j) {
                const double t = 2 * pi * j / 5;
                pts.push_back(v2(std::cos(t), std::sin(t)) + slice(d, 2 * j, 2, 0.35) + shift);
              }
              k = hull_of(pts);
            } else if (v == 1) {
              std::vector<Vector> pts;
              const Vector shift = slice(d, 18, 3, 0.5);
              for (int j = 0; j < 6; ++j) {
                Vector p = (j % 2 ? -1.0 : 1.0) * Vector::Unit(3, j / 2);
                pts.push_back(p + slice(d, 3 * j, 3, 0.35) + shift);
              }
              k = hull_of(pts);
            } else {
              k = make_ellipsoid(near_identity(d, 0, 2, 0.6), o.grid_size);
            }
            BsOptions bo;
            bo.santalo.grid_size = o.grid_size;
            return from_report(bs_check(k, bo), {{"body", body_to_json(k)}});
          }};
}

Family logconcave_functions() {
  return {"Thm4.1", 4,
          [](int v) -> std::size_t { return v == 0 || v == 3 ? 6 : v == 1 ? 4 : 2; },
          [](int v, const Delta& d, const FuzzOptions& o) {
            std::optional<LogConcaveFn> f;
            RhoKernel rho = RhoKernel::exp();
            if (v == 0 || v == 3) {
              f = LogConcaveFn::gaussian(near_identity(d, 0, 2, 0.6), slice(d, 4, 2, 0.5));
              if (v == 3) rho = RhoKernel::power(2);
            } else if (v == 1) {
              f = LogConcaveFn::product({{Factor1D::Kind::Laplace, std::exp(0.4 * d[0]), 0.5 * d[1]},
                                         {Factor1D::Kind::Gaussian, std::exp(0.4 * d[2]), 0.5 * d[3]}});
            } else {
              f = LogConcaveFn::product({{Factor1D::Kind::OneSided, std::exp(0.4 * d[0]), 0.5 * d[1]}});
            }
            FunctionalOptions fo;
            fo.g_integration.grid_size = 64;
            fo.center.grid_size = o.grid_size;
            return from_report(functional_santalo_verify(*f, rho, std::nullopt, std::nullopt, fo),
                               {{"function", function_to_json(*f)}, {"rho", rho_to_json(rho)}});
          }};
}

Family convex_gridfns() {
  return {"Thm5.1", 4, [](int v) -> std::size_t { return v == 0 ? 10 : 5; },
          [](int v, const Delta& d, const FuzzOptions&) {
            const int n = v == 0 ? 2 : 1;  // 1: exp, 2: power, 3: indicator
            Eigen::MatrixXd a = n == 2 ? near_identity(d, 0, 2, 0.6) : Eigen::MatrixXd::Constant(1, 1, std::exp(0.4 * d[0]));
            const std::size_t off = n == 2 ? 4 : 1;
            // the last row is the zero affine function
            Eigen::MatrixXd slopes = Eigen::MatrixXd::Zero(3, n);
            std::vector<double> offsets(3, 0.0);
            for (int i = 0; i < 2; ++i) {
              for (int j = 0; j < n; ++j) slopes(i, j) = 0.5 * d[off + i * (n + 1) + j];
              offsets[i] = 0.5 * d[off + i * (n + 1) + n];
            }
            const double lo = v >= 2 ? -4.0 : -7.0, hi = -lo;
            const std::size_t nodes = n == 2 ? 97 : 801;
            const RhoKernel rho = v == 3 ? RhoKernel::indicator() : v == 2 ? RhoKernel::power(2) : RhoKernel::exp();
            Json desc = {{"kind", "max-affine"}, {"matrix", matrix_to_json(a)}, {"slopes", matrix_to_json(slopes)},
                         {"offsets", offsets}, {"lo", lo}, {"hi", hi}, {"nodes", nodes}};
            const GridFn phi = gridfn_from_json(desc);
            Json inst = {{"phi", std::move(desc)}, {"rho", rho_to_json(rho)}};
            return from_report(legendre_santalo_verify(phi, rho), std::move(inst));
          }};
}

Family rho_kernels() {
  return {"Thm4.1", 2, [](int v) -> std::size_t { return v == 0 ? 6 : 3; },
          [](int v, const Delta& d, const FuzzOptions&) {
            RhoKernel rho = RhoKernel::exp();
            if (v == 0) {
              const double t1 = 1.0 + 0.5 * d[0], t2 = t1 + 1.0 + 0.5 * d[1];
              const double s0 = -(1.0 + 0.5 * d[2]);
              const double s1 = s0 - 0.5 * (1.0 + d[3]);
              rho = RhoKernel::piecewise({0.0, t1, t2}, {0.0, s0 * t1, s0 * t1 + s1 * (t2 - t1)});
            } else {
              rho = RhoKernel::power(2.0 * std::exp(0.5 * d[0]));
            }
            const std::size_t last = v == 0 ? 4 : 1;
            const auto f = LogConcaveFn::product({{Factor1D::Kind::Gaussian, std::exp(0.5 * d[last]), 0.5 * d[last + 1]}});
            Report r = functional_santalo_verify(f, rho);
            const auto flags = rho.verify();
            r.check_true("declared kernel flags hold", "Thm4.1", flags.ok);
            return from_report(r, {{"rho", rho_to_json(rho)}, {"function", function_to_json(f)}});
          }};
}

Family measure_pairs() {
  return {"Cor2.2", 3, [](int) -> std::size_t { return 8; },
          [](int v, const Delta& d, const FuzzOptions& o) {
            const double s = std::exp(0.5 * d[6]);
            std::vector<Vector> pts;
            if (v == 0) {
              // the product measure needs an unconditional body: an octagon
              // with all sign flips of two first-quadrant points
              const double t0 = pi / 8 + 0.3 * d[0], t1 = 3 * pi / 8 + 0.3 * d[1];
              for (const auto& [t, r] : {std::pair{t0, std::exp(0.5 * d[2])}, std::pair{t1, std::exp(0.5 * d[3])}}) {
                for (double sx : {-1.0, 1.0}) {
                  for (double sy : {-1.0, 1.0}) pts.push_back(s * r * v2(sx * std::cos(t), sy * std::sin(t)));
                }
              }
            } else {
              const PolytopeV hex = symmetric_hexagon(d);
              for (const auto& p : hex.vertices()) pts.push_back(s * p);
            }
            const PolytopeV k = hull_of(pts);
            const DensityMeasure mu = v == 0   ? DensityMeasure::gaussian(2)
                                      : v == 1 ? DensityMeasure::gaussian_radial(2)
                                               : DensityMeasure::truncated_lebesgue(2, 1.2 * std::exp(0.3 * d[7]));
            MeasureOptions mo;
            mo.grid_size = o.grid_size;
            return from_report(measure_product_check(mu, k, mo), {{"measure", mu.label()}, {"body", body_to_json(k)}});
          }};
}

Family family_named(const std::string& name) {
  if (name == "symmetric-polytopes") return symmetric_polytopes(false);
  if (name == "polygons" || name == "symmetric-polygons") return symmetric_polytopes(true);
  if (name == "convex-bodies") return convex_bodies();
  if (name == "logconcave-functions") return logconcave_functions();
  if (name == "convex-gridfns") return convex_gridfns();
  if (name == "rho-kernels") return rho_kernels();
  if (name == "measure-pairs") return measure_pairs();
  throw Error(ErrorCode::InvalidInput, "unknown fuzz family '" + name + "'");
}

struct CaseResult {
  int variant = 0;
  Delta delta;
  Outcome outcome;
  std::string error;
};

}  // namespace

std::vector<std::string> fuzz_families() {
  return {"symmetric-polytopes", "convex-bodies", "logconcave-functions", "convex-gridfns", "rho-kernels",
          "measure-pairs", "polygons", "symmetric-polygons"};
}

Report fuzz(const std::string& name, const FuzzOptions& opts) {
  const Family fam = family_named(name);
  require(opts.count > 0, ErrorCode::InvalidInput, "fuzz count must be positive");
  const CounterRng root(opts.seed, 0xf022);

  std::vector<CaseResult> results(opts.count);
  auto run_case = [&](std::size_t i) {
    const CounterRng rng = root.substream(i);
    CaseResult& c = results[i];
    c.variant = static_cast<int>(rng.bits(0) % static_cast<std::uint64_t>(fam.variants));
    c.delta.resize(fam.size(c.variant));
    for (std::size_t j = 0; j < c.delta.size(); ++j) c.delta[j] = rng.uniform(j + 1, -1.0, 1.0);
    try {
      c.outcome = fam.run(c.variant, c.delta, opts);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  };
  const unsigned threads = std::max(1u, opts.threads ? opts.threads : std::thread::hardware_concurrency());
  if (threads == 1) {
    for (std::size_t i = 0; i < opts.count; ++i) run_case(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < opts.count; i = next++) run_case(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  Report rep("fuzz:" + name);
  rep.seed("fuzz", opts.seed);
  std::size_t violations = 0, errors = 0, failed_checks = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_case = 0;
  Json error_list = Json::array();
  Json side_list = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& c = results[i];
    if (!c.error.empty()) {
      ++errors;
      if (error_list.size() < 10) error_list.push_back({{"case", i}, {"error", c.error}});
      continue;
    }
    if (c.outcome.margin < worst) {
      worst = c.outcome.margin;
      worst_case = i;
    }
    if (c.outcome.margin < -opts.tol) {
      ++violations;
    } else if (!c.outcome.passed) {
      ++failed_checks;
      if (side_list.size() < 10) side_list.push_back({{"case", i}, {"failed", c.outcome.failed}, {"instance", c.outcome.instance}});
    }
  }
  rep.set("cases", static_cast<double>(opts.count));
  rep.set("violations", static_cast<double>(violations));
  rep.set("errors", static_cast<double>(errors));
  rep.set("failed_side_checks", static_cast<double>(failed_checks));
  rep.set("worst_margin", std::isfinite(worst) ? worst : 0.0);
  rep.set("worst_case", static_cast<double>(worst_case));
  rep.note("family", name);
  if (!error_list.empty()) rep.note("errors", error_list);
  if (!side_list.empty()) rep.note("side_check_failures", side_list);
  if (failed_checks > 0) rep.warn(std::to_string(failed_checks) + " cases failed a side check without violating the inequality");

  if (violations > 0) {
    // shrink the worst violation toward the canonical instance
    const auto& c = results[worst_case];
    Delta d = c.delta;
    Outcome best = c.outcome;
    int steps = 0;
    for (; steps < opts.shrink_steps; ++steps) {
      Delta half = d;
      for (auto& x : half) x *= 0.5;
      try {
        const Outcome o = fam.run(c.variant, half, opts);
        if (!(o.margin < -opts.tol)) break;
        d = std::move(half);
        best = o;
      } catch (const std::exception&) {
        break;
      }
    }
    rep.note("counterexample", {{"case", worst_case},
                                {"variant", c.variant},
                                {"halvings", steps},
                                {"perturbation", d},
                                {"margin", best.margin},
                                {"instance", best.instance}});
  }
  rep.check_le_abs("no violations", fam.tag, static_cast<double>(violations), 0.0, 0.0);
  rep.check_le_abs("every case evaluated", fam.tag, static_cast<double>(errors), 0.0, 0.0);
  rep.check_ge("worst margin >= -tol", fam.tag, std::isfinite(worst) ? worst : 0.0, -opts.tol, 0.0);
  return rep;
}

}  // namespace santalo
