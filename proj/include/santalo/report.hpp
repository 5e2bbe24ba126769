#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace santalo {

/// One compared pair: pass/fail always travels with both numbers and the tolerance.
struct Assertion {
  std::string name;
  std::string tag;       // source result, e.g. "BS-ineq", "Thm4.1"
  std::string relation;  // le_rel | ge_rel | near_rel | near_abs | le_abs | true
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

class Report {
 public:
  explicit Report(std::string scenario = {}) : scenario_(std::move(scenario)) {}

  const std::string& scenario() const { return scenario_; }
  void set_scenario(std::string s) { scenario_ = std::move(s); }

  void set(const std::string& key, double value) { values_[key] = value; }
  double value(const std::string& key) const;
  bool has(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, double>& values() const { return values_; }

  void note(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }
  const nlohmann::json& extra() const { return extra_; }

  void warn(std::string w);
  const std::vector<std::string>& warnings() const { return warnings_; }

  void seed(const std::string& key, std::uint64_t s) { seeds_[key] = s; }
  const std::map<std::string, std::uint64_t>& seeds() const { return seeds_; }

  // lhs <= rhs * (1 + tol) for rhs >= 0
  bool check_le(const std::string& name, const std::string& tag, double lhs, double rhs, double tol);
  bool check_ge(const std::string& name, const std::string& tag, double lhs, double rhs, double tol);
  // |lhs - rhs| <= tol * |rhs|
  bool check_near(const std::string& name, const std::string& tag, double lhs, double rhs, double tol);
  // |lhs - rhs| <= tol
  bool check_near_abs(const std::string& name, const std::string& tag, double lhs, double rhs,
                      double tol);
  // lhs <= rhs + tol
  bool check_le_abs(const std::string& name, const std::string& tag, double lhs, double rhs,
                    double tol);
  bool check_true(const std::string& name, const std::string& tag, bool ok);

  const std::vector<Assertion>& assertions() const { return assertions_; }
  bool passed() const;

  /// Append another report's content with a key prefix.
  void absorb(const Report& other, const std::string& prefix);

  double wall_time = 0.0;

 private:
  std::string scenario_;
  std::map<std::string, double> values_;
  nlohmann::json extra_ = nlohmann::json::object();
  std::vector<std::string> warnings_;
  std::map<std::string, std::uint64_t> seeds_;
  std::vector<Assertion> assertions_;
};

nlohmann::json to_json(const Report& r, bool include_wall_time = true);
std::string to_csv(const Report& r);

/// Relative margin (rhs - lhs) / |rhs|; positive when lhs < rhs.
double relative_margin(double lhs, double rhs);

}  // namespace santalo
