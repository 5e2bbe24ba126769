#include "santalo/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "santalo/error.hpp"

namespace santalo {

double Report::value(const std::string& key) const {
  auto it = values_.find(key);
  require(it != values_.end(), ErrorCode::InvalidInput, "report has no value '" + key + "'");
  return it->second;
}

void Report::warn(std::string w) {
  if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) {
    warnings_.push_back(std::move(w));
  }
}

bool Report::check_le(const std::string& name, const std::string& tag, double lhs, double rhs,
                      double tol) {
  const bool ok = std::isfinite(lhs) && lhs <= rhs + tol * std::abs(rhs);
  assertions_.push_back({name, tag, "le_rel", lhs, rhs, tol, ok});
  return ok;
}

bool Report::check_ge(const std::string& name, const std::string& tag, double lhs, double rhs,
                      double tol) {
  const bool ok = std::isfinite(lhs) && lhs >= rhs - tol * std::abs(rhs);
  assertions_.push_back({name, tag, "ge_rel", lhs, rhs, tol, ok});
  return ok;
}

bool Report::check_near(const std::string& name, const std::string& tag, double lhs, double rhs,
                        double tol) {
  const bool ok = std::isfinite(lhs) && std::abs(lhs - rhs) <= tol * std::abs(rhs);
  assertions_.push_back({name, tag, "near_rel", lhs, rhs, tol, ok});
  return ok;
}

bool Report::check_near_abs(const std::string& name, const std::string& tag, double lhs,
                            double rhs, double tol) {
  const bool ok = std::isfinite(lhs) && std::abs(lhs - rhs) <= tol;
  assertions_.push_back({name, tag, "near_abs", lhs, rhs, tol, ok});
  return ok;
}

bool Report::check_le_abs(const std::string& name, const std::string& tag, double lhs, double rhs,
                          double tol) {
  const bool ok = std::isfinite(lhs) && lhs <= rhs + tol;
  assertions_.push_back({name, tag, "le_abs", lhs, rhs, tol, ok});
  return ok;
}

bool Report::check_true(const std::string& name, const std::string& tag, bool ok) {
  assertions_.push_back({name, tag, "true", ok ? 1.0 : 0.0, 1.0, 0.0, ok});
  return ok;
}

bool Report::passed() const {
  return std::all_of(assertions_.begin(), assertions_.end(), [](const Assertion& a) { return a.pass; });
}

void Report::absorb(const Report& other, const std::string& prefix) {
  for (const auto& [k, v] : other.values_) values_[prefix + k] = v;
  for (auto a : other.assertions_) {
    a.name = prefix + a.name;
    assertions_.push_back(std::move(a));
  }
  for (const auto& w : other.warnings_) warn(w);
  for (const auto& [k, v] : other.seeds_) seeds_[prefix + k] = v;
  for (const auto& [k, v] : other.extra_.items()) extra_[prefix + k] = v;
}

double relative_margin(double lhs, double rhs) {
  return rhs == 0.0 ? (lhs <= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity())
                    : (rhs - lhs) / std::abs(rhs);
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json to_json(const Report& r, bool include_wall_time) {
  nlohmann::json j;
  j["scenario"] = r.scenario();
  j["passed"] = r.passed();
  auto& vals = j["values"] = nlohmann::json::object();
  for (const auto& [k, v] : r.values()) vals[k] = number(v);
  auto& as = j["assertions"] = nlohmann::json::array();
  for (const auto& a : r.assertions()) {
    as.push_back({{"name", a.name},
                  {"tag", a.tag},
                  {"relation", a.relation},
                  {"lhs", number(a.lhs)},
                  {"rhs", number(a.rhs)},
                  {"tolerance", a.tolerance},
                  {"pass", a.pass}});
  }
  j["warnings"] = r.warnings();
  j["seeds"] = r.seeds();
  j["details"] = r.extra();
  if (include_wall_time) j["wall_time_s"] = r.wall_time;
  return j;
}

std::string to_csv(const Report& r) {
  std::ostringstream os;
  os.precision(17);
  os << "scenario,assertion,tag,relation,lhs,rhs,tolerance,pass\n";
  for (const auto& a : r.assertions()) {
    os << r.scenario() << ',' << a.name << ',' << a.tag << ',' << a.relation << ',' << a.lhs << ','
       << a.rhs << ',' << a.tolerance << ',' << (a.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace santalo
