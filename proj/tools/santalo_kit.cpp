#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "santalo/runner.hpp"

using namespace santalo;

int main(int argc, char** argv) {
  CLI::App app{"santalo-kit: scenario runner for volume-product and functional Santalo checks"};
  std::string command, config_path, out_path, format;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "scenario command")
      ->required()
      ->check(CLI::IsMember(scenario_commands()));
  app.add_option("--config", config_path, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "overrides the scenario seed");
  app.add_option("--out", out_path, "report path (default: stdout)");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    auto cfg = load_config(config_path);
    if (cfg.command != command) {
      std::cerr << "santalo-kit: " << config_path << " describes '" << cfg.command << "', not '" << command << "'\n";
      return 2;
    }
    if (seed) cfg.seed = seed;
    if (!out_path.empty()) cfg.out_path = out_path;
    if (!format.empty()) cfg.format = format;

    const Report rep = run(cfg);
    const auto text = render(rep, cfg.format);
    if (cfg.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(cfg.out_path);
      if (!(os << text)) {
        std::cerr << "santalo-kit: cannot write " << cfg.out_path << '\n';
        return 2;
      }
    }
    for (const auto& a : rep.assertions()) {
      if (!a.pass) std::cerr << "FAIL " << a.name << " [" << a.tag << "]: " << a.lhs << " vs " << a.rhs << '\n';
    }
    return exit_code(rep);
  } catch (const Error& e) {
    std::cerr << "santalo-kit: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "santalo-kit: " << e.what() << '\n';
    return 3;
  }
}
