#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "glucolab/control/ou.hpp"
#include "glucolab/control/tuner.hpp"
#include "glucolab/eval/metrics.hpp"
#include "glucolab/rl/bcq.hpp"
#include "glucolab/rl/cql.hpp"
#include "glucolab/rl/td3bc.hpp"

namespace glucolab {

enum class ScenarioKind { standard, sample_size, bolus_overestimate, suboptimal_pid, irregular_meals };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& text);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::standard;
  /// sample count | overestimation fraction | demonstrator rank | meal-time sd (minutes).
  /// Ignored for the standard scenario.
  double parameter = 0.0;

  /// Throws ConfigError when the parameter is not on the scenario's grid.
  void validate() const;
};

/// The documented grid of a scenario kind (empty for standard).
std::vector<double> scenario_grid(ScenarioKind kind);

enum class Algorithm { pid, td3bc, bcq, cql };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

/// Settings shared by every scenario.
struct PipelineConfig {
  EnvConfig env;
  GridSpec grid = GridSpec::default_grid();
  OuParams ou;
  double carb_noise_sd = 0.1;
  std::size_t n_samples = 100000;
  rl::Td3BcConfig td3bc;
  rl::BcqConfig bcq;
  rl::CqlConfig cql;
  std::vector<std::uint64_t> training_seeds = {1, 2, 3};
  std::vector<std::uint64_t> test_seeds = {1001, 1002, 1003};
  std::size_t jobs = 1;

  void validate() const;
};

/// Trained policies keyed by everything that determines their weights, so
/// scenarios that differ only at evaluation time reuse training runs.
class PolicyCache {
 public:
  std::optional<rl::Policy> find(const std::string& key) const;
  void insert(const std::string& key, const rl::Policy& policy);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, rl::Policy> policies_;
};

/// Inputs of one scenario point after applying the scenario parameter.
struct ScenarioSetup {
  EnvConfig train_env;  // tuning and data collection
  EnvConfig eval_env;
  std::size_t n_samples = 0;
  std::size_t demonstrator_rank = 1;
};

ScenarioSetup scenario_setup(const ScenarioConfig& scenario, const PipelineConfig& pipeline);

std::uint64_t dataset_seed(const PatientParams& patient, std::uint64_t training_seed);
std::uint64_t learner_seed(const PatientParams& patient, std::uint64_t training_seed);

rl::TrainResult train_algorithm(Algorithm algorithm, const OfflineDataset& dataset,
                                const PipelineConfig& pipeline, std::uint64_t seed);

struct ScenarioPoint {
  Algorithm algorithm = Algorithm::pid;
  GlycemicReport report;
  /// Rollouts ordered by patient, training seed, test seed. PID has no
  /// training seed and contributes patients x test seeds rollouts.
  std::vector<RolloutTrace> traces;
};

struct ScenarioResult {
  ScenarioConfig scenario;
  std::vector<std::string> patient_ids;
  std::vector<PidParams> demonstrators;  // per patient
  std::vector<ScenarioPoint> points;     // one per requested algorithm

  const ScenarioPoint& point(Algorithm algorithm) const;
};

/// Tunes the demonstrator, collects data, trains and evaluates every
/// algorithm for every (patient, training seed).
ScenarioResult run_scenario(const ScenarioConfig& scenario, const std::vector<Algorithm>& algorithms,
                            const std::vector<PatientParams>& patients,
                            const PipelineConfig& pipeline, PolicyCache* cache = nullptr);

}  // namespace glucolab
