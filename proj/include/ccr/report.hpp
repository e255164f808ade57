#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ccr/errors.hpp"
#include "ccr/scenario.hpp"

namespace ccr {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Format { kJson, kCsv, kText };

Format parse_format(const std::string& name);

struct RunOptions {
  Format format = Format::kJson;
  std::optional<std::uint64_t> seed;
  /// Overrides indifference bands, axiom conclusion tolerance and the
  /// membership tolerance.
  std::optional<double> tolerance;
};

struct Table {
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  nlohmann::ordered_json body;
  std::vector<Table> tables;
  bool violation_found = false;

  std::string render(Format format) const;
};

inline const std::vector<std::string> kCommands{"evaluate", "compare", "axioms", "membership", "equilibrium",
                                                "sweep"};

/// Runs one command against a loaded scenario. Module errors propagate as
/// ccr::Error with their exit codes.
Report run_command(const std::string& command, const ScenarioDocument& doc, const RunOptions& options = {});

/// Rounds to 12 significant digits (the value the reports print).
double round12(double x);

}  // namespace ccr
