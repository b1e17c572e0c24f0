#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "oppfl/sim_engine.hpp"
#include "oppfl/tune.hpp"

namespace oppfl {

inline constexpr int kConfigSchemaVersion = 1;

// Parse and fully validate a scenario config. Unknown keys are rejected at
// every nesting level; the error message names the offending field.
Scenario parse_scenario(const nlohmann::json& config);
Scenario load_scenario_file(const std::filesystem::path& path);

// Canonical JSON echo of a scenario; parse_scenario(scenario_to_json(s))
// round-trips.
nlohmann::json scenario_to_json(const Scenario& scenario);

// Optional "tune" section (grid value lists); defaults when absent.
TuneGrid parse_tune_grid(const nlohmann::json& config);

// Apply one `--set key.path=value` override onto raw config JSON. The value
// is parsed as JSON when possible and falls back to a plain string.
void apply_override(nlohmann::json& config, const std::string& assignment);

// FNV-1a over the canonical dump, hex-encoded; identifies a scenario in the
// run manifest.
std::string scenario_hash(const nlohmann::json& config);

}  // namespace oppfl
