#include "glucolab/control/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "glucolab/control/pid_controller.hpp"
#include "glucolab/util/errors.hpp"
#include "glucolab/util/parallel.hpp"

namespace glucolab {

void GridSpec::validate() const {
  if (kp_values.empty() || ki_values.empty() || kd_values.empty()) {
    throw ConfigError("grid: gain lists must be non-empty");
  }
  if (!(episode_days > 0.0)) throw ConfigError("grid: episode_days must be > 0");
}

GridSpec GridSpec::default_grid() {
  GridSpec g;
  for (int k = 0; k < 8; ++k) {
    const double magnitude = std::pow(10.0, -4.0 + 3.0 * k / 7.0);
    g.kp_values.push_back(-magnitude);
    g.kp_values.push_back(magnitude);
  }
  g.ki_values = {0.0};
  for (double m : {1e-7, 1e-6, 1e-5, 1e-4}) {
    g.ki_values.push_back(-m);
    g.ki_values.push_back(m);
  }
  g.kd_values = {0.0};
  for (double m : {1e-3, 1e-2, 1e-1, 1.0}) {
    g.kd_values.push_back(-m);
    g.kd_values.push_back(m);
  }
  return g;
}

double pid_episode_reward(const PidParams& params, const PatientParams& patient,
                          const EnvConfig& env_config, std::uint64_t seed) {
  GlucoseEnv env(patient, env_config, seed);
  PidController controller(params);
  double total = 0.0;
  while (!env.done()) total += env.step(controller.act(env)).reward;
  return total;
}

std::vector<RankedPid> rank_pid_grid(const GridSpec& grid, const PatientParams& patient,
                                     const EnvConfig& env_config, std::size_t jobs) {
  grid.validate();
  EnvConfig config = env_config;
  config.episode.length_days = grid.episode_days;

  std::vector<RankedPid> ranked;
  ranked.reserve(grid.size());
  for (double kp : grid.kp_values) {
    for (double ki : grid.ki_values) {
      for (double kd : grid.kd_values) {
        PidParams p;
        p.kp = kp;
        p.ki = ki;
        p.kd = kd;
        ranked.push_back({p, 0.0});
      }
    }
  }
  parallel_for(ranked.size(), jobs, [&](std::size_t i) {
    ranked[i].total_reward = pid_episode_reward(ranked[i].params, patient, config, grid.seed);
  });
  std::sort(ranked.begin(), ranked.end(), [](const RankedPid& a, const RankedPid& b) {
    if (a.total_reward != b.total_reward) return a.total_reward > b.total_reward;
    return std::tie(a.params.kp, a.params.ki, a.params.kd) <
           std::tie(b.params.kp, b.params.ki, b.params.kd);
  });
  return ranked;
}

PidParams tune_pid(const GridSpec& grid, const PatientParams& patient, std::size_t rank,
                   const EnvConfig& env_config, std::size_t jobs) {
  grid.validate();
  if (rank < 1 || rank > grid.size()) {
    throw ConfigError("tune_pid: rank " + std::to_string(rank) + " outside grid of " +
                      std::to_string(grid.size()));
  }
  return rank_pid_grid(grid, patient, env_config, jobs)[rank - 1].params;
}

}  // namespace glucolab
