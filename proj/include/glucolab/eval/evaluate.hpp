#pragma once

#include <cstdint>
#include <vector>

#include "glucolab/control/pid.hpp"
#include "glucolab/env/controller.hpp"
#include "glucolab/eval/metrics.hpp"
#include "glucolab/rl/policy.hpp"

namespace glucolab {

/// Seeds of the evaluation rollouts. Distinct from every training stream.
std::vector<std::uint64_t> default_test_seeds(std::size_t n);

/// Env seed of one evaluation rollout; depends on patient and test seed only,
/// so every controller faces the same meals and sensor noise.
std::uint64_t rollout_seed(const PatientParams& patient, std::uint64_t test_seed);

/// One episode of `controller` from the patient's equilibrium.
RolloutTrace run_rollout(Controller& controller, const PatientParams& patient,
                         const EnvConfig& env_config, std::uint64_t seed);

std::vector<RolloutTrace> evaluate_controller(Controller& controller,
                                              const PatientParams& patient,
                                              const std::vector<std::uint64_t>& test_seeds,
                                              const EnvConfig& env_config);

std::vector<RolloutTrace> evaluate_policy_traces(const rl::Policy& policy,
                                                 const PatientParams& patient,
                                                 const std::vector<std::uint64_t>& test_seeds,
                                                 const EnvConfig& env_config);

std::vector<RolloutTrace> evaluate_pid_traces(const PidParams& pid, const PatientParams& patient,
                                              const std::vector<std::uint64_t>& test_seeds,
                                              const EnvConfig& env_config);

/// Rollouts of `policy` for the first `n_test_seeds` default test seeds.
GlycemicReport evaluate_policy(const rl::Policy& policy, const PatientParams& patient,
                               std::size_t n_test_seeds, const EpisodeConfig& episode = {});

GlycemicReport evaluate_pid(const PidParams& pid, const PatientParams& patient,
                            std::size_t n_test_seeds, const EpisodeConfig& episode = {});

}  // namespace glucolab
