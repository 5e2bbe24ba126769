#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>

#include "santalo/runner.hpp"

using namespace santalo;

namespace {

const std::string fixtures = FIXTURES;

std::string message_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
    return e.what();
  }
  FAIL("expected an input error");
  return {};
}

ScenarioConfig parse(const std::string& text) { return config_from_json(parse_json(text), fixtures); }

}  // namespace

TEST_CASE("every command has a fixture that passes") {
  for (const auto& name : {"volume-product-cube3", "polar-square", "santalo-triangle", "measure-hexagon",
                           "prekopa-exp", "legendre-quadratic", "center-gaussian", "steiner-square"}) {
    CAPTURE(name);
    const auto rep = run(load_config(fixtures + "/" + name + ".json"));
    CHECK(rep.passed());
    CHECK(exit_code(rep) == 0);
    for (const auto& a : rep.assertions()) CHECK_FALSE(a.tag.empty());
  }
}

TEST_CASE("cube volume product through the runner") {
  const auto rep = run(load_config(fixtures + "/volume-product-cube3.json"));
  CHECK(rep.value("volume_product") == doctest::Approx(32.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("same config, same report apart from wall time") {
  const auto cfg = parse(R"({"command": "fuzz", "family": "convex-bodies", "count": 25, "seed": 9})");
  const auto a = to_json(run(cfg), false).dump();
  const auto b = to_json(run(cfg), false).dump();
  CHECK(a == b);
  auto other = cfg;
  other.seed = 10;
  CHECK(to_json(run(other), false).dump() != a);
}

TEST_CASE("digest follows the content, not the formatting or the output fields") {
  const auto a = parse(R"({"command": "polar", "body": "square", "z": [0, 0]})");
  const auto b = parse(R"({ "z": [0,0],  "body": "square", "command": "polar",
                            "output": {"path": "elsewhere.json", "format": "csv"} })");
  const auto c = parse(R"({"command": "polar", "body": "square", "z": [0, 0.1]})");
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a) != config_digest(c));
  CHECK(config_digest(a).size() == 40);
}

TEST_CASE("file references are inlined") {
  const auto cfg = load_config(fixtures + "/steiner-square.json");
  CHECK(cfg.inputs["body"]["kind"] == "regular-polygon");
}

TEST_CASE("validation names the offending field") {
  CHECK(message_of([] { parse(R"({"body": "square"})"); }).find("'command'") != std::string::npos);
  CHECK(message_of([] { parse(R"({"command": "mahler"})"); }).find("unknown command") != std::string::npos);
  CHECK(message_of([] { parse(R"({"command": "polar", "body": "square", "grid_size": 0})"); })
            .find("'grid_size': must be positive") != std::string::npos);
  CHECK(message_of([] { parse(R"({"command": "fuzz", "family": "polygons", "count": -3, "seed": 1})"); })
            .find("'count'") != std::string::npos);
  CHECK(message_of([] { parse(R"({"command": "polar"})"); }).find("'body': required") != std::string::npos);
  CHECK(message_of([] { parse(R"({"command": "polar", "body": "square", "samples": 10})"); })
            .find("not used by command 'polar'") != std::string::npos);
  CHECK(message_of([] { run(parse(R"({"command": "polar", "body": "rhombus"})")); }).find("'body'") !=
        std::string::npos);
  CHECK(message_of([] { run(parse(R"({"command": "polar", "body": "square", "z": [0, 0, 0]})")); })
            .find("'z'") != std::string::npos);
}

TEST_CASE("stochastic commands need a seed") {
  for (const auto& text : {R"({"command": "fuzz", "family": "polygons", "count": 2})",
                           R"({"command": "functional-check", "f": {"family": "standard-gaussian", "dim": 1}})",
                           R"({"command": "measure-check", "body": "square", "method": "monte-carlo", "samples": 100})"}) {
    CHECK(message_of([&] { run(parse(text)); }).find("'seed'") != std::string::npos);
  }
}

TEST_CASE("expectations become assertions") {
  auto rep = run(parse(R"({"command": "polar", "body": "square", "z": 0,
                           "expect": [{"value": "polar_volume", "near": 2, "abs_tol": 1e-12},
                                      {"value": "volume_product", "le": 7.5}]})"));
  CHECK_FALSE(rep.passed());
  CHECK(exit_code(rep) == 1);
  int failed = 0;
  for (const auto& a : rep.assertions()) failed += !a.pass;
  CHECK(failed == 1);
  CHECK(message_of([] { run(parse(R"({"command": "polar", "body": "square", "expect": {"value": "nope", "near": 1}})")); })
            .find("no value 'nope'") != std::string::npos);
}

TEST_CASE("exit codes by error kind") {
  CHECK(exit_code(ErrorCode::InvalidInput) == 2);
  CHECK(exit_code(ErrorCode::HypothesisFail) == 2);
  CHECK(exit_code(ErrorCode::SolverFail) == 3);
  CHECK(exit_code(ErrorCode::QuadFail) == 3);
}

TEST_CASE("csv rendering has one row per assertion") {
  const auto rep = run(load_config(fixtures + "/polar-square.json"));
  const auto csv = render(rep, "csv");
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == rep.assertions().size() + 1);
}
