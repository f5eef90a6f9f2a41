#pragma once

// Scenario files: flat `section.key = value` lines, `#` starts a comment.
// Omitted keys keep their defaults; unknown keys are errors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdmp/engine.hpp"

namespace tdmp {

struct ProtocolSpec {
  Protocol protocol = Protocol::Tdmp;
  WeightFactors factors;
  std::string label;  // CSV `protocol` column
};

/// Parses `tdmp`, `gpsr`, `ablation`, or `tdmp:p/q1/q2` (likewise for
/// ablation). `defaults` supplies the factors of a bare token.
ProtocolSpec parse_protocol(const std::string& token, const WeightFactors& defaults);

struct ScenarioConfig {
  /// Network, demand shape and every run parameter. The demand is rescaled
  /// per vehicle count by scenario_for().
  Scenario base;
  std::vector<std::int64_t> vehicle_counts{25, 50, 100, 200};
  std::vector<ProtocolSpec> protocols;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::optional<std::string> output_path;
};

/// Throws ConfigError with the line number and key of the offending entry.
/// Relative file paths are resolved against `base_dir`.
ScenarioConfig parse_config_text(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig parse_config(const std::string& path);

/// The concrete scenario for one sweep cell.
Scenario scenario_for(const ScenarioConfig& cfg, std::int64_t vehicle_count, const ProtocolSpec& protocol);

}  // namespace tdmp
