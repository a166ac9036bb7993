#include "glucolab/eval/evaluate.hpp"

#include "glucolab/control/pid_controller.hpp"
#include "glucolab/util/random.hpp"

namespace glucolab {

namespace {

constexpr std::uint64_t kFirstTestSeed = 1001;

}  // namespace

std::vector<std::uint64_t> default_test_seeds(std::size_t n) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < n; ++k) seeds.push_back(kFirstTestSeed + k);
  return seeds;
}

std::uint64_t rollout_seed(const PatientParams& patient, std::uint64_t test_seed) {
  return derive_seed(test_seed, hash_string(patient.id));
}

RolloutTrace run_rollout(Controller& controller, const PatientParams& patient,
                         const EnvConfig& env_config, std::uint64_t seed) {
  GlucoseEnv env(patient, env_config, seed);
  env.reset();
  controller.reset();
  RolloutTrace trace;
  trace.patient_id = patient.id;
  trace.age_group = patient.age_group;
  const std::size_t horizon = env_config.episode.horizon_steps();
  trace.cgm.reserve(horizon);
  trace.true_glucose.reserve(horizon);
  while (!env.done()) {
    const StepRecord r = env.step(controller.act(env));
    trace.cgm.push_back(r.cgm);
    trace.true_glucose.push_back(r.true_glucose);
    trace.reward_sum += r.reward;
  }
  return trace;
}

std::vector<RolloutTrace> evaluate_controller(Controller& controller,
                                              const PatientParams& patient,
                                              const std::vector<std::uint64_t>& test_seeds,
                                              const EnvConfig& env_config) {
  std::vector<RolloutTrace> traces;
  for (std::uint64_t s : test_seeds) {
    traces.push_back(run_rollout(controller, patient, env_config, rollout_seed(patient, s)));
  }
  return traces;
}

std::vector<RolloutTrace> evaluate_policy_traces(const rl::Policy& policy,
                                                 const PatientParams& patient,
                                                 const std::vector<std::uint64_t>& test_seeds,
                                                 const EnvConfig& env_config) {
  rl::PolicyController controller(policy);
  return evaluate_controller(controller, patient, test_seeds, env_config);
}

std::vector<RolloutTrace> evaluate_pid_traces(const PidParams& pid, const PatientParams& patient,
                                              const std::vector<std::uint64_t>& test_seeds,
                                              const EnvConfig& env_config) {
  PidController controller(pid);
  return evaluate_controller(controller, patient, test_seeds, env_config);
}

GlycemicReport evaluate_policy(const rl::Policy& policy, const PatientParams& patient,
                               std::size_t n_test_seeds, const EpisodeConfig& episode) {
  EnvConfig env;
  env.episode = episode;
  return compute_metrics(
      evaluate_policy_traces(policy, patient, default_test_seeds(n_test_seeds), env));
}

GlycemicReport evaluate_pid(const PidParams& pid, const PatientParams& patient,
                            std::size_t n_test_seeds, const EpisodeConfig& episode) {
  EnvConfig env;
  env.episode = episode;
  return compute_metrics(evaluate_pid_traces(pid, patient, default_test_seeds(n_test_seeds), env));
}

}  // namespace glucolab
