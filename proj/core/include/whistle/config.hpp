#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "whistle/baselines.hpp"
#include "whistle/simulator.hpp"

namespace whistle {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "WHISTLE_OUTPUT_DIR";

/// A scenario: shared trial parameters, the schemes to compare, trial count,
/// base seed and output location. Trial k of every scheme uses seed + k and
/// sees the same trace.
struct ScenarioConfig {
  TrialConfig trial;  // `scheme` and `seed` are filled per run
  std::optional<std::filesystem::path> trace_path;
  std::vector<Scheme> schemes;
  std::size_t trials{10};
  std::uint64_t seed{1};
  std::filesystem::path output_dir{"whistle-out"};
};

/// Parses and validates a scenario document. Unknown keys and wrong types are
/// ConfigErrors naming the field (e.g. "edges[1].quota"). Relative trace paths
/// resolve against `base_dir`.
ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads a JSON scenario file; honours the output directory override.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Normalised document for a scenario (every field explicit).
nlohmann::ordered_json scenario_to_json(const ScenarioConfig& config);

TrialConfig trial_config(const ScenarioConfig& config, const Scheme& scheme, std::size_t trial);

/// The trace of trial `trial`: the configured file, or a synthetic trace
/// seeded with seed + trial.
std::vector<Task> trial_trace(const ScenarioConfig& config, std::size_t trial);

}  // namespace whistle
