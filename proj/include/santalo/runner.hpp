#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "santalo/error.hpp"
#include "santalo/report.hpp"
#include "santalo/serialize.hpp"

namespace santalo {

/// A scenario file: {"command": ..., <inputs>, "seed": N, "output": {"path", "format"},
/// "expect": [...]}. Inputs stay as JSON until run() dispatches on the command.
struct ScenarioConfig {
  std::string command;
  Json inputs = Json::object();  // every field except command, seed and output
  std::optional<std::uint64_t> seed;
  std::string out_path;          // empty: stdout
  std::string format = "json";   // json | csv
  std::string base_dir;          // where {"file": ...} references are resolved
};

std::vector<std::string> scenario_commands();

/// Splits and validates a parsed scenario. Field problems raise InvalidInput
/// naming the field, e.g. "field 'grid_size': must be positive".
ScenarioConfig config_from_json(const Json& j, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);
Json config_to_json(const ScenarioConfig& c);

/// Hex SHA-1 of the canonical config text (output fields excluded).
std::string config_digest(const ScenarioConfig& c);

/// Dispatches to the module operation named by the command; "expect"
/// entries add assertions on report values.
Report run(const ScenarioConfig& c);

/// 0 pass, 1 assertion failure, 2 input error, 3 solver failure.
int exit_code(const Report& r);
int exit_code(ErrorCode code);

std::string render(const Report& r, const std::string& format);

}  // namespace santalo
