#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ccr/errors.hpp"
#include "ccr/report.hpp"
#include "ccr/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Correlation-concern valuation, axiom checks and asset pricing", "ccr"};
  app.set_version_flag("--version", ccr::kToolVersion);

  std::string command;
  std::string scenario;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string out;
  bool strict = false;

  app.add_option("command", command, "evaluate | compare | axioms | membership | equilibrium | sweep")
      ->required()
      ->check(CLI::IsMember(ccr::kCommands));
  app.add_option("--scenario", scenario, "Scenario JSON file")->required();
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--seed", seed, "Seed for randomized axiom menus");
  app.add_option("--tolerance", tolerance, "Indifference and conclusion tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Write the report here instead of stdout");
  app.add_flag("--strict", strict, "Exit with status 5 when an axiom violation is found");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ccr::ExitCode::kValidation);
  }

  try {
    const ccr::ScenarioDocument doc = ccr::load_scenario(scenario);
    ccr::RunOptions options;
    options.format = ccr::parse_format(format);
    options.seed = seed;
    options.tolerance = tolerance;
    const ccr::Report report = ccr::run_command(command, doc, options);
    const std::string text = report.render(options.format);
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream file(out, std::ios::binary);
      if (!file) throw ccr::ValidationError("cannot write '" + out + "'");
      file << text;
    }
    if (strict && report.violation_found) return static_cast<int>(ccr::ExitCode::kAxiomViolation);
    return 0;
  } catch (const ccr::Error& e) {
    std::cerr << "ccr: error " << static_cast<int>(e.code()) << ": " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "ccr: error 4: " << e.what() << '\n';
    return static_cast<int>(ccr::ExitCode::kSolver);
  }
}
