#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "glucolab/eval/scenario.hpp"
#include "glucolab/util/keyvalue.hpp"

namespace glucolab::cli {

/// Everything a command needs, read from one INI file. Relative file paths
/// resolve against the config file's directory.
struct RunConfig {
  std::filesystem::path cohort_file = default_cohort_path();
  std::optional<std::filesystem::path> meal_file;
  std::vector<std::string> patients;
  std::vector<Algorithm> algorithms = {Algorithm::pid, Algorithm::td3bc, Algorithm::bcq,
                                       Algorithm::cql};
  std::vector<std::size_t> pid_ranks = {1, 10, 20};
  std::size_t demonstrator_rank = 1;
  PipelineConfig pipeline;
  ScenarioKind scenario_kind = ScenarioKind::standard;
  std::vector<double> scenario_parameters;  // empty: the kind's full grid

  /// SHA-256 of the config text plus any command-line overrides.
  std::string hash;

  void validate() const;
};

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = ".",
                           const std::string& origin = "<string>");

/// Throws ConfigError if the file is absent.
RunConfig load_run_config(const std::filesystem::path& path);

/// Replaces the training seeds with {seed}.
void apply_seed_override(RunConfig& config, std::uint64_t seed);

std::vector<PatientParams> selected_patients(const RunConfig& config);

}  // namespace glucolab::cli
