#pragma once

#include <cstdint>
#include <vector>

#include "glucolab/control/pid.hpp"
#include "glucolab/env/glucose_env.hpp"

namespace glucolab {

struct GridSpec {
  std::vector<double> kp_values;
  std::vector<double> ki_values;
  std::vector<double> kd_values;
  double episode_days = 10.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return kp_values.size() * ki_values.size() * kd_values.size(); }
  void validate() const;

  /// kp: +-1e-4..1e-1 (8 log-spaced magnitudes, both signs);
  /// ki: 0, +-1e-7..1e-4; kd: 0, +-1e-3..1.
  static GridSpec default_grid();
};

struct RankedPid {
  PidParams params;
  double total_reward = 0.0;
};

/// Total reward of one noiseless PID episode.
double pid_episode_reward(const PidParams& params, const PatientParams& patient,
                          const EnvConfig& env_config, std::uint64_t seed);

/// Every grid point simulated on the same seeded episode, best first. Ties
/// break by lexicographic (kp, ki, kd).
std::vector<RankedPid> rank_pid_grid(const GridSpec& grid, const PatientParams& patient,
                                     const EnvConfig& env_config, std::size_t jobs = 1);

/// The rank-th best grid point (rank 1 = tuned PID).
PidParams tune_pid(const GridSpec& grid, const PatientParams& patient, std::size_t rank,
                   const EnvConfig& env_config, std::size_t jobs = 1);

}  // namespace glucolab
