#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ccr/asset_pricing.hpp"
#include "ccr/core_model.hpp"
#include "ccr/valuation.hpp"

namespace ccr {

struct NamedLottery {
  std::string name;
  Lottery lottery;
};

/// Command-specific parameters, kept as parsed JSON.
struct QueryBlock {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
};

/// A validated scenario file. Either part may be absent: decision scenarios
/// carry a model and lotteries, asset scenarios carry an economy.
struct ScenarioDocument {
  std::string name;
  std::string description;
  std::optional<CcrModel> model;
  std::vector<NamedLottery> lotteries;
  std::optional<Economy> economy;
  std::vector<QueryBlock> queries;

  const Lottery& lottery(const std::string& name) const;
  /// Query blocks for `command`, in file order.
  std::vector<const QueryBlock*> queries_for(const std::string& command) const;
};

/// Throws ValidationError with line and column on malformed JSON, or naming
/// the offending field when validation fails.
ScenarioDocument parse_scenario(const std::string& text);
ScenarioDocument load_scenario(const std::string& path);

/// Canonical JSON form; probabilities are written as shortest round-trip
/// decimal strings.
nlohmann::json to_json(const ScenarioDocument& doc);
ScenarioDocument from_json(const nlohmann::json& j);

/// "(A,B)" style label of a joint state.
std::string joint_state_label(const CcrModel& model, std::size_t linear);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string scenario_hash(const ScenarioDocument& doc);

/// Shortest decimal that reads back to the same double.
std::string shortest_decimal(double x);

}  // namespace ccr
