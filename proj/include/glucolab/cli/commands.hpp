#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "glucolab/cli/manifest.hpp"
#include "glucolab/cli/run_config.hpp"
#include "glucolab/control/pid.hpp"

namespace glucolab::cli {

struct CommandOptions {
  std::filesystem::path out_dir = "run";
  std::size_t jobs = 1;
  std::ostream* log = nullptr;  // progress messages; silent when null
};

/// Artifact locations inside a run directory.
std::string pid_file(const std::string& patient);
std::string dataset_file(const std::string& patient, std::uint64_t seed);
std::string policy_file(Algorithm algorithm, const std::string& patient, std::uint64_t seed);
inline constexpr const char* kEvaluationReport = "reports/evaluation.csv";
inline constexpr const char* kEvaluationSummary = "reports/evaluation_summary.txt";

/// Ranked PID parameters for one patient, as written by tune-pid.
PidParams load_pid_rank(const std::filesystem::path& path, std::size_t rank);

/// Writes pid/<patient>.ini with the configured ranks (plus rank 1 and the
/// demonstrator rank).
Manifest cmd_tune_pid(const RunConfig& config, const CommandOptions& options);
/// Writes data/<patient>_seed<k>.csv logs collected by the demonstrator.
Manifest cmd_generate(const RunConfig& config, const CommandOptions& options);
/// Writes policies/<algorithm>_<patient>_seed<k>.weights.
Manifest cmd_train(const RunConfig& config, const CommandOptions& options);
/// Writes the evaluation report and summary for the tuned PID and every trained policy.
Manifest cmd_evaluate(const RunConfig& config, const CommandOptions& options);
/// Runs the configured scenario over its grid; writes figures/<fig>.csv and a summary.
Manifest cmd_scenario(const RunConfig& config, const CommandOptions& options);

/// Re-hashes everything reachable from the run's manifests. Throws
/// ChecksumError listing the problems when anything is missing or changed.
std::size_t cmd_verify(const std::filesystem::path& run_dir, std::ostream* log = nullptr);

}  // namespace glucolab::cli
