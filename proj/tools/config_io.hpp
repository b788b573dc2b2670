#pragma once

#include "adess/economics.hpp"
#include "adess/net_sim.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace adess::cli {

// JSON keys mirror the struct field names. Unknown keys and wrongly typed
// values raise ConfigError naming the offending key path.
[[nodiscard]] ScenarioConfig scenario_from_json(const nlohmann::json& j);
[[nodiscard]] AttackParams attack_from_json(const nlohmann::json& j, const std::string& path = "attack");

[[nodiscard]] nlohmann::json to_json(const ScenarioConfig& cfg);
[[nodiscard]] nlohmann::json to_json(const AttackParams& p);

[[nodiscard]] ScenarioConfig load_scenario(const std::string& path);

// Enum spellings match the to_string() forms; throw ConfigError otherwise.
[[nodiscard]] Protocol parse_protocol(const std::string& s);
[[nodiscard]] AdjustmentMode parse_adjustment(const std::string& s);
[[nodiscard]] AttackerStrategy parse_strategy(const std::string& s);

}  // namespace adess::cli
