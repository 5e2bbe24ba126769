#include "santalo/runner.hpp"

#include <boost/uuid/detail/sha1.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "santalo/fuzz.hpp"
#include "santalo/geometry.hpp"
#include "santalo/legendre.hpp"
#include "santalo/logconcave.hpp"
#include "santalo/measure.hpp"
#include "santalo/polar.hpp"
#include "santalo/symmetrization.hpp"

namespace santalo {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

struct CommandShape {
  std::string tag;
  std::set<std::string> fields;
  std::set<std::string> required;
  bool stochastic = false;
};

const std::map<std::string, CommandShape>& commands() {
  static const std::map<std::string, CommandShape> table = {
      {"polar", {"BS-ineq", {"body", "z", "grid_size"}, {"body"}}},
      {"santalo-point", {"BS-ineq", {"body", "grid_size", "tol_rel", "max_iter", "tol"}, {"body"}}},
      {"volume-product", {"BS-ineq", {"body", "z", "grid_size", "tol"}, {"body"}}},
      {"measure-check", {"Cor2.2", {"body", "measure", "method", "samples", "grid_size", "tol"}, {"body"}}},
      {"functional-check",
       {"Thm4.1",
        {"f", "rho", "z", "g", "tol", "equality_band", "hypothesis_samples", "g_grid_size", "grid_size"},
        {"f"},
        true}},
      {"prekopa-check",
       {"Prop2.1", {"dim", "f1", "f2", "f3", "samples", "sample_scale", "tol", "unconditional"}, {"f1", "f2", "f3"}, true}},
      {"legendre", {"Thm5.1", {"phi", "rho", "z", "tol", "equality_band", "biconjugate", "emit_transform"}, {"phi"}}},
      {"center-find", {"Thm4.1", {"f", "phi", "rho", "tol_rel", "max_iter", "grid_size"}, {}}},
      {"steiner",
       {"Steiner-vp", {"body", "direction", "directions", "iterations", "grid_size", "tol", "ellipsoid"}, {"body"}}},
      {"fuzz", {"BS-ineq", {"family", "count", "tol", "threads", "shrink_steps", "grid_size"}, {"family"}, true}},
  };
  return table;
}

const std::set<std::string> kPositive = {"grid_size", "tol",        "tol_rel",     "max_iter",          "samples",
                                         "count",     "iterations", "threads",     "shrink_steps",      "sample_scale",
                                         "equality_band", "hypothesis_samples", "g_grid_size", "dim"};
const std::set<std::string> kCommon = {"name", "expect"};

std::string field_error(const std::string& field, const std::string& what) {
  return "field '" + field + "': " + what;
}

// {"file": "x.json"} anywhere in the inputs is replaced by that file's content.
Json resolve_files(const Json& j, const std::filesystem::path& base) {
  if (j.is_object() && j.size() == 1 && j.contains("file") && j.at("file").is_string()) {
    auto p = std::filesystem::path(j.at("file").get<std::string>());
    if (p.is_relative()) p = base / p;
    return resolve_files(read_json_file(p.string()), p.parent_path());
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [k, v] : j.items()) out[k] = resolve_files(v, base);
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(resolve_files(v, base));
    return out;
  }
  return j;
}

double num(const Json& in, const char* key, double fallback) {
  if (!in.contains(key)) return fallback;
  if (!in.at(key).is_number()) bad(field_error(key, "must be a number"));
  return in.at(key).get<double>();
}

int integer(const Json& in, const char* key, int fallback) {
  if (!in.contains(key)) return fallback;
  if (!in.at(key).is_number_integer() && !in.at(key).is_number_unsigned()) bad(field_error(key, "must be an integer"));
  return in.at(key).get<int>();
}

bool flag(const Json& in, const char* key, bool fallback) {
  if (!in.contains(key)) return fallback;
  if (!in.at(key).is_boolean()) bad(field_error(key, "must be true or false"));
  return in.at(key).get<bool>();
}

template <class F>
auto field(const Json& in, const char* key, F parse) {
  try {
    return parse(in.at(key));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidInput) throw;
    std::string msg = e.what();
    if (const auto p = msg.find(": "); p != std::string::npos) msg = msg.substr(p + 2);
    bad(field_error(key, msg));
  } catch (const Json::exception& e) {
    bad(field_error(key, e.what()));
  }
}

ConvexBody body_of(const Json& in) {
  return field(in, "body", [&](const Json& j) { return body_from_json(j, integer(in, "grid_size", 0)); });
}

RhoKernel rho_of(const Json& in) {
  if (!in.contains("rho")) return RhoKernel::exp();
  return field(in, "rho", rho_from_json);
}

// "auto" or absent: solver's choice; 0: origin; otherwise a vector
std::optional<Vector> center_of(const Json& in, int n) {
  if (!in.contains("z")) return std::nullopt;
  const auto& z = in.at("z");
  if (z.is_string() && z.get<std::string>() == "auto") return std::nullopt;
  if (z.is_number() && z.get<double>() == 0.0) return Vector::Zero(n);
  const Vector v = field(in, "z", vector_from_json);
  if (v.size() != n) bad(field_error("z", "expected " + std::to_string(n) + " coordinates"));
  return v;
}

Json vec(const Vector& v) { return vector_to_json(v); }

// x -> factor * F(dilation * x)
Evaluator scaled_function(const Json& in, const char* key) {
  return field(in, key, [](const Json& j) -> Evaluator {
    const bool wrapped = j.is_object() && j.contains("function");
    const auto f = function_from_json(wrapped ? j.at("function") : j);
    const double d = wrapped ? j.value("factor", 1.0) : 1.0;
    const double c = wrapped ? j.value("dilation", 1.0) : 1.0;
    if (!(d > 0) || !(c > 0)) bad("factor and dilation must be positive");
    return [f, c, d](const Vector& x) { return d * f(c * x); };
  });
}

int function_dim(const Json& in, const char* key) {
  const auto& j = in.at(key);
  const bool wrapped = j.is_object() && j.contains("function");
  return field(in, key, [&](const Json&) { return function_from_json(wrapped ? j.at("function") : j).dim(); });
}

Report run_polar(const Json& in) {
  const auto k = body_of(in);
  const int n = dim(k);
  const Vector z = center_of(in, n).value_or(Vector::Zero(n));
  const auto p = polar_wrt(k, z, integer(in, "grid_size", 0));
  Report rep("polar");
  rep.set("body_volume", volume(k));
  rep.set("polar_volume", p.volume);
  rep.set("volume_product", volume(k) * p.volume);
  rep.note("z", vec(z));
  rep.note("polar", body_to_json(p.body));
  rep.check_true("polar volume finite and positive", "BS-ineq", std::isfinite(p.volume) && p.volume > 0);
  return rep;
}

Report run_santalo_point(const Json& in) {
  const auto k = body_of(in);
  BsOptions o;
  o.santalo.grid_size = integer(in, "grid_size", 0);
  o.santalo.tol_rel = num(in, "tol_rel", o.santalo.tol_rel);
  o.santalo.max_iter = integer(in, "max_iter", o.santalo.max_iter);
  o.tol = num(in, "tol", o.tol);
  return bs_check(k, o);
}

Report run_volume_product(const Json& in) {
  const auto k = body_of(in);
  const int n = dim(k);
  const auto z = center_of(in, n);
  const double tol = num(in, "tol", 1e-3);
  if (!z) {
    BsOptions o;
    o.santalo.grid_size = integer(in, "grid_size", 0);
    o.tol = tol;
    Report rep = bs_check(k, o);
    rep.set_scenario("volume-product");
    return rep;
  }
  Report rep("volume-product");
  const double vp = volume_product(k, *z, integer(in, "grid_size", 0));
  const double vn2 = std::pow(ball_volume(n), 2);
  rep.set("volume_product", vp);
  rep.set("v_n^2", vn2);
  rep.note("z", vec(*z));
  // a symmetric body has its Santalo point at its centre
  if (z->norm() == 0.0 && is_centrally_symmetric(k, 1e-9)) {
    rep.check_le("|K| |K^{*0}| <= v_n^2", "BS-ineq", vp, vn2, tol);
  } else {
    rep.check_true("volume product finite", "BS-ineq", std::isfinite(vp) && vp > 0);
  }
  return rep;
}

Report run_measure(const Json& in, const std::optional<std::uint64_t>& seed) {
  const auto k = body_of(in);
  const auto mu = in.contains("measure") ? field(in, "measure", [&](const Json& j) { return measure_from_json(j, dim(k)); })
                                         : DensityMeasure::gaussian(dim(k));
  MeasureOptions o;
  o.grid_size = integer(in, "grid_size", 0);
  o.tol = num(in, "tol", o.tol);
  const std::string method = in.value("method", "quadrature");
  if (method == "monte-carlo") {
    o.method = MeasureOptions::Method::MonteCarlo;
    o.samples = static_cast<std::size_t>(num(in, "samples", static_cast<double>(o.samples)));
    if (!seed) bad(field_error("seed", "required for the monte-carlo method"));
    o.seed = *seed;
  } else if (method != "quadrature") {
    bad(field_error("method", "expected quadrature or monte-carlo"));
  }
  return measure_product_check(mu, k, o);
}

Report run_functional(const Json& in, std::uint64_t seed) {
  const auto f = field(in, "f", function_from_json);
  const auto rho = rho_of(in);
  FunctionalOptions o;
  o.tol = num(in, "tol", o.tol);
  o.equality_band = num(in, "equality_band", o.equality_band);
  o.hypothesis.seed = seed;
  o.hypothesis.samples = static_cast<std::size_t>(num(in, "hypothesis_samples", static_cast<double>(o.hypothesis.samples)));
  o.center.grid_size = integer(in, "grid_size", 0);
  o.g_integration.grid_size = integer(in, "g_grid_size", o.g_integration.grid_size);
  std::optional<Evaluator> g;
  if (in.contains("g") && !(in.at("g").is_string() && in.at("g").get<std::string>() == "polar")) {
    const auto gf = field(in, "g", function_from_json);
    if (gf.dim() != f.dim()) bad(field_error("g", "dimension differs from f"));
    g = [gf](const Vector& y) { return gf(y); };
  }
  return functional_santalo_verify(f, rho, center_of(in, f.dim()), g, o);
}

Report run_prekopa(const Json& in, std::uint64_t seed) {
  const int n = in.contains("dim") ? integer(in, "dim", 1) : function_dim(in, "f3");
  PrekopaOptions o;
  o.seed = seed;
  o.samples = static_cast<std::size_t>(num(in, "samples", static_cast<double>(o.samples)));
  o.sample_scale = num(in, "sample_scale", o.sample_scale);
  o.tol = num(in, "tol", o.tol);
  o.unconditional = flag(in, "unconditional", o.unconditional);
  return prekopa_geometric_check(n, scaled_function(in, "f1"), scaled_function(in, "f2"), scaled_function(in, "f3"), o);
}

Report run_legendre(const Json& in) {
  const auto phi = field(in, "phi", gridfn_from_json);
  const auto rho = rho_of(in);
  LegendreOptions o;
  o.tol = num(in, "tol", o.tol);
  o.equality_band = num(in, "equality_band", o.equality_band);
  o.z = center_of(in, phi.dim());
  Report rep = legendre_santalo_verify(phi, rho, o);
  const Vector z = o.z ? *o.z : vector_from_json(rep.extra().at("z"));
  if (flag(in, "biconjugate", false)) rep.absorb(biconjugate_check(phi, z), "biconjugate.");
  if (flag(in, "emit_transform", false)) rep.note("transform", gridfn_to_json(legendre_transform(phi, z)));
  return rep;
}

Report run_center(const Json& in) {
  Report rep("center-find");
  if (in.contains("f") == in.contains("phi")) bad("center-find needs exactly one of the fields 'f' and 'phi'");
  if (in.contains("f")) {
    const auto f = field(in, "f", function_from_json);
    CenterOptions o;
    o.tol_rel = num(in, "tol_rel", o.tol_rel);
    o.max_iter = integer(in, "max_iter", o.max_iter);
    o.grid_size = integer(in, "grid_size", 0);
    const auto c = find_center(f, o);
    rep.note("z0", vec(c.z0));
    rep.set("|z0|", c.z0.norm());
    rep.set("centroid_residual", c.centroid_residual);
    rep.set("iterations", c.iterations);
    rep.note("fallback", c.fallback);
    rep.check_le_abs("centroid of K_z0 at the origin", "Thm4.1", c.centroid_residual, 0.0, c.tolerance);
    return rep;
  }
  const auto phi = field(in, "phi", gridfn_from_json);
  CenterSolveOptions o;
  o.tol = num(in, "tol_rel", o.tol);
  const auto c = optimal_center(phi, rho_of(in), o);
  rep.note("z0", vec(c.z0));
  rep.set("|z0|", c.z0.norm());
  rep.set("objective", c.objective);
  rep.set("residual", c.residual);
  rep.set("evaluations", c.evaluations);
  if (c.nonunique_possible) rep.warn("nonunique_possible");
  rep.check_le_abs("stationarity of the center objective", "Thm5.1", c.residual, 0.0, o.tol);
  return rep;
}

Report run_steiner(const Json& in) {
  auto k = body_of(in);
  const int n = dim(k);
  std::vector<Vector> dirs;
  if (in.contains("directions")) {
    const auto& ds = in.at("directions");
    if (!ds.is_array() || ds.empty()) bad(field_error("directions", "must be a non-empty array of vectors"));
    for (const auto& d : ds) dirs.push_back(field(Json{{"directions", d}}, "directions", vector_from_json));
  } else if (in.contains("direction")) {
    dirs.push_back(field(in, "direction", vector_from_json));
  } else {
    for (int i = 0; i < n; ++i) dirs.push_back(Vector::Unit(n, i));
  }
  for (auto& u : dirs) {
    if (u.size() != n || !(u.norm() > 0)) bad(field_error("directions", "need non-zero vectors of dimension " + std::to_string(n)));
    u.normalize();
  }
  const int rounds = integer(in, "iterations", 1);
  const int grid = integer(in, "grid_size", 0);
  const double tol = num(in, "tol", 1e-2);
  const bool symmetric = is_centrally_symmetric(k, 1e-6);

  Report rep("steiner");
  Json steps = Json::array();
  double worst_drift = 0.0;
  double vp_prev = symmetric ? volume_product(k, Vector::Zero(n), grid) : 0.0;
  const double vp_start = vp_prev;
  double vp_drop = 0.0;  // worst relative decrease of vp over a single step
  for (int r = 0; r < rounds; ++r) {
    for (const auto& u : dirs) {
      const auto s = steiner_symmetrize(k, u, grid);
      const double drift = std::abs(s.volume_after - s.volume_before) / s.volume_before;
      worst_drift = std::max(worst_drift, drift);
      Json step = {{"direction", vec(u)}, {"volume_before", s.volume_before}, {"volume_after", s.volume_after},
                   {"exact", s.exact}};
      k = s.body;
      if (symmetric) {
        const double vp = volume_product(k, Vector::Zero(n), grid);
        step["volume_product"] = vp;
        vp_drop = std::min(vp_drop, (vp - vp_prev) / vp_prev);
        vp_prev = vp;
      }
      steps.push_back(step);
    }
  }
  rep.note("steps", steps);
  rep.note("body", body_to_json(k));
  rep.set("volume", volume(k));
  rep.check_le_abs("volume preserved", "Steiner-vp", worst_drift, 0.0, 1e-6);
  if (symmetric) {
    rep.set("vp_before", vp_start);
    rep.set("vp_after", vp_prev);
    rep.set("worst_step_change", vp_drop);
    rep.check_ge("volume product non-decreasing", "Steiner-vp", 1.0 + vp_drop, 1.0, tol);
  }
  if (flag(in, "ellipsoid", false)) {
    const auto e = ellipsoid_test(k, 1e-2, grid);
    rep.set("ellipsoid_defect", e.defect);
    rep.note("ellipsoid", e.is_ellipsoid);
  }
  return rep;
}

Report run_fuzz(const Json& in, std::uint64_t seed) {
  FuzzOptions o;
  o.seed = seed;
  o.count = static_cast<std::size_t>(num(in, "count", static_cast<double>(o.count)));
  o.tol = num(in, "tol", o.tol);
  o.threads = static_cast<unsigned>(integer(in, "threads", 0));
  o.shrink_steps = integer(in, "shrink_steps", o.shrink_steps);
  o.grid_size = integer(in, "grid_size", 0);
  const auto family = in.at("family").get<std::string>();
  const auto known = fuzz_families();
  if (std::find(known.begin(), known.end(), family) == known.end()) {
    bad(field_error("family", "unknown family '" + family + "'"));
  }
  return fuzz(family, o);
}

void add_expectations(Report& rep, const Json& expect, const std::string& tag) {
  const Json list = expect.is_array() ? expect : Json::array({expect});
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    const std::string where = "expect[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("value") || !e.at("value").is_string()) bad(field_error(where, "needs a 'value' key naming a report value"));
    const auto key = e.at("value").get<std::string>();
    if (!rep.has(key)) bad(field_error(where, "report has no value '" + key + "'"));
    const double v = rep.value(key);
    const std::string name = "expect " + key;
    if (e.contains("near")) {
      const double target = e.at("near").get<double>();
      if (e.contains("abs_tol")) rep.check_near_abs(name, tag, v, target, e.at("abs_tol").get<double>());
      else rep.check_near(name, tag, v, target, e.value("rel_tol", 1e-3));
    } else if (e.contains("le")) {
      rep.check_le(name, tag, v, e.at("le").get<double>(), e.value("tol", 0.0));
    } else if (e.contains("ge")) {
      rep.check_ge(name, tag, v, e.at("ge").get<double>(), e.value("tol", 0.0));
    } else {
      bad(field_error(where, "needs one of 'near', 'le', 'ge'"));
    }
  }
}

}  // namespace

std::vector<std::string> scenario_commands() {
  std::vector<std::string> out;
  for (const auto& [k, v] : commands()) out.push_back(k);
  return out;
}

ScenarioConfig config_from_json(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) bad("scenario must be a JSON object");
  if (!j.contains("command") || !j.at("command").is_string()) bad(field_error("command", "missing or not a string"));
  ScenarioConfig c;
  c.command = j.at("command").get<std::string>();
  c.base_dir = base_dir;
  const auto it = commands().find(c.command);
  if (it == commands().end()) bad(field_error("command", "unknown command '" + c.command + "'"));
  const auto& shape = it->second;
  for (const auto& [k, v] : j.items()) {
    if (k == "command") continue;
    if (k == "seed") {
      if (!v.is_number_unsigned() && !v.is_number_integer()) bad(field_error("seed", "must be a non-negative integer"));
      if (v.get<std::int64_t>() < 0) bad(field_error("seed", "must be a non-negative integer"));
      c.seed = v.get<std::uint64_t>();
      continue;
    }
    if (k == "output") {
      if (!v.is_object()) bad(field_error("output", "must be an object with 'path' and 'format'"));
      c.out_path = v.value("path", "");
      c.format = v.value("format", "json");
      continue;
    }
    if (!shape.fields.contains(k) && !kCommon.contains(k)) bad(field_error(k, "not used by command '" + c.command + "'"));
    if (kPositive.contains(k)) {
      if (!v.is_number()) bad(field_error(k, "must be a number"));
      if (!(v.get<double>() > 0)) bad(field_error(k, "must be positive"));
    }
    c.inputs[k] = resolve_files(v, base_dir);
  }
  for (const auto& r : shape.required) {
    if (!c.inputs.contains(r)) bad(field_error(r, "required by command '" + c.command + "'"));
  }
  if (c.format != "json" && c.format != "csv") bad(field_error("output.format", "expected json or csv"));
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path();
  return config_from_json(read_json_file(path), base.empty() ? "." : base.string());
}

Json config_to_json(const ScenarioConfig& c) {
  Json j = c.inputs;
  j["command"] = c.command;
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

std::string config_digest(const ScenarioConfig& c) {
  boost::uuids::detail::sha1 h;
  const auto text = config_to_json(c).dump();
  h.process_bytes(text.data(), text.size());
  boost::uuids::detail::sha1::digest_type d;
  h.get_digest(d);
  std::string out;
  char buf[9];
  for (auto w : d) {
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(w));
    out += buf;
  }
  return out;
}

Report run(const ScenarioConfig& c) {
  const auto& shape = commands().at(c.command);
  if (shape.stochastic && !c.seed) bad(field_error("seed", "required by command '" + c.command + "'"));
  const auto& in = c.inputs;
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = c.seed.value_or(0);
  Report rep;
  if (c.command == "polar") rep = run_polar(in);
  else if (c.command == "santalo-point") rep = run_santalo_point(in);
  else if (c.command == "volume-product") rep = run_volume_product(in);
  else if (c.command == "measure-check") rep = run_measure(in, c.seed);
  else if (c.command == "functional-check") rep = run_functional(in, seed);
  else if (c.command == "prekopa-check") rep = run_prekopa(in, seed);
  else if (c.command == "legendre") rep = run_legendre(in);
  else if (c.command == "center-find") rep = run_center(in);
  else if (c.command == "steiner") rep = run_steiner(in);
  else rep = run_fuzz(in, seed);
  if (in.contains("expect")) add_expectations(rep, in.at("expect"), shape.tag);
  rep.set_scenario(in.value("name", c.command));
  rep.note("command", c.command);
  rep.note("digest", config_digest(c));
  if (c.seed) rep.seed("seed", *c.seed);
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

int exit_code(const Report& r) { return r.passed() ? 0 : 1; }

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverFail:
    case ErrorCode::QuadFail: return 3;
    default: return 2;
  }
}

std::string render(const Report& r, const std::string& format) {
  if (format == "csv") return to_csv(r);
  return to_json(r, true).dump(2) + "\n";
}

}  // namespace santalo
