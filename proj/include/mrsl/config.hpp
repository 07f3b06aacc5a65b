#pragma once

#include <string>

#include <json.hpp>

#include "mrsl/simulation.hpp"

namespace mrsl {

// JSON layout of a simulation configuration:
//   {"world": {...}, "radio": {...}, "filter": {...}, "fusion": {...}, "doa": {...}}
// Every section is optional when reading, and so is every field inside a section;
// missing fields keep their current value. Unknown keys and mistyped values raise a
// ConfigError carrying the dotted key path.

nlohmann::json to_json(const SimulationConfig& config);

/// Reads `doc` on top of `base`.
SimulationConfig merge_simulation_config(const SimulationConfig& base, const nlohmann::json& doc);

/// Applies "dotted.key=value" to `doc`. The key must already exist. The value is parsed as
/// JSON when possible and as a string otherwise; an array target also accepts a
/// comma-separated list. Returns the key path.
std::string apply_override(nlohmann::json& doc, const std::string& assignment);

std::string to_string(InitMode mode);

}  // namespace mrsl
