#include "glucolab/eval/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glucolab/data/trajectory.hpp"
#include "glucolab/eval/evaluate.hpp"
#include "glucolab/util/errors.hpp"
#include "glucolab/util/keyvalue.hpp"
#include "glucolab/util/parallel.hpp"

namespace glucolab {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::standard: return "standard";
    case ScenarioKind::sample_size: return "sample_size";
    case ScenarioKind::bolus_overestimate: return "bolus_overestimate";
    case ScenarioKind::suboptimal_pid: return "suboptimal_pid";
    case ScenarioKind::irregular_meals: return "irregular_meals";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& text) {
  for (auto k : {ScenarioKind::standard, ScenarioKind::sample_size, ScenarioKind::bolus_overestimate,
                 ScenarioKind::suboptimal_pid, ScenarioKind::irregular_meals}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown scenario kind '" + text + "'");
}

std::vector<double> scenario_grid(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::standard: return {};
    case ScenarioKind::sample_size: return {1e4, 5e4, 1e5, 5e5};
    case ScenarioKind::bolus_overestimate: return {0.0, 0.1, 0.2, 0.3, 0.4};
    case ScenarioKind::suboptimal_pid: return {1, 10, 20};
    case ScenarioKind::irregular_meals: return {0, 30, 60};
  }
  return {};
}

void ScenarioConfig::validate() const {
  if (kind == ScenarioKind::standard) return;
  const auto grid = scenario_grid(kind);
  const bool on_grid = std::any_of(grid.begin(), grid.end(), [&](double g) {
    return std::abs(parameter - g) <= 1e-12 * std::max(1.0, std::abs(g));
  });
  if (!on_grid) {
    throw ConfigError("scenario " + to_string(kind) + ": parameter " + format_double(parameter) +
                      " is not a grid point");
  }
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::pid: return "pid";
    case Algorithm::td3bc: return "td3bc";
    case Algorithm::bcq: return "bcq";
    case Algorithm::cql: return "cql";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
  for (auto a : {Algorithm::pid, Algorithm::td3bc, Algorithm::bcq, Algorithm::cql}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigError("unknown algorithm '" + text + "'");
}

void PipelineConfig::validate() const {
  env.validate();
  grid.validate();
  ou.validate();
  td3bc.validate();
  bcq.validate();
  cql.validate();
  if (!(carb_noise_sd >= 0.0)) throw ConfigError("carb_noise_sd must be >= 0");
  if (n_samples == 0) throw ConfigError("n_samples must be > 0");
  if (training_seeds.empty()) throw ConfigError("at least one training seed is required");
  if (test_seeds.empty()) throw ConfigError("at least one test seed is required");
  if (jobs == 0) throw ConfigError("jobs must be >= 1");
}

std::optional<rl::Policy> PolicyCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = policies_.find(key);
  if (it == policies_.end()) return std::nullopt;
  return it->second;
}

void PolicyCache::insert(const std::string& key, const rl::Policy& policy) {
  std::lock_guard lock(mutex_);
  policies_.insert_or_assign(key, policy);
}

std::size_t PolicyCache::size() const {
  std::lock_guard lock(mutex_);
  return policies_.size();
}

ScenarioSetup scenario_setup(const ScenarioConfig& scenario, const PipelineConfig& pipeline) {
  scenario.validate();
  ScenarioSetup s;
  s.train_env = pipeline.env;
  s.eval_env = pipeline.env;
  s.n_samples = pipeline.n_samples;
  switch (scenario.kind) {
    case ScenarioKind::standard:
      break;
    case ScenarioKind::sample_size:
      s.n_samples = static_cast<std::size_t>(std::llround(scenario.parameter));
      break;
    case ScenarioKind::bolus_overestimate:
      s.eval_env.bolus_scale = pipeline.env.bolus_scale * (1.0 + scenario.parameter);
      break;
    case ScenarioKind::suboptimal_pid:
      s.demonstrator_rank = static_cast<std::size_t>(std::llround(scenario.parameter));
      break;
    case ScenarioKind::irregular_meals:
      s.train_env.meal_time_sd = scenario.parameter;
      s.eval_env.meal_time_sd = scenario.parameter;
      break;
  }
  return s;
}

std::uint64_t dataset_seed(const PatientParams& patient, std::uint64_t training_seed) {
  return derive_seed(derive_seed(training_seed, hash_string(patient.id)), 100);
}

std::uint64_t learner_seed(const PatientParams& patient, std::uint64_t training_seed) {
  return derive_seed(derive_seed(training_seed, hash_string(patient.id)), 200);
}

rl::TrainResult train_algorithm(Algorithm algorithm, const OfflineDataset& dataset,
                                const PipelineConfig& pipeline, std::uint64_t seed) {
  switch (algorithm) {
    case Algorithm::td3bc: return rl::train_td3bc(dataset, pipeline.td3bc, seed);
    case Algorithm::bcq: return rl::train_bcq_discrete(dataset, pipeline.bcq, seed);
    case Algorithm::cql: return rl::train_cql_discrete(dataset, pipeline.cql, seed);
    case Algorithm::pid: break;
  }
  throw ConfigError("pid is not a learner");
}

const ScenarioPoint& ScenarioResult::point(Algorithm algorithm) const {
  for (const auto& p : points) {
    if (p.algorithm == algorithm) return p;
  }
  throw Error("scenario result has no " + to_string(algorithm) + " entry");
}

namespace {

std::string hidden_string(const std::vector<std::size_t>& hidden) {
  std::string out;
  for (auto h : hidden) out += std::to_string(h) + "x";
  return out;
}

std::string learner_signature(Algorithm algorithm, const PipelineConfig& p) {
  std::ostringstream os;
  switch (algorithm) {
    case Algorithm::td3bc: {
      const auto& c = p.td3bc;
      os << format_double(c.actor_lr) << ',' << format_double(c.critic_lr) << ','
         << format_double(c.alpha) << ',' << format_double(c.tau) << ','
         << format_double(c.policy_noise) << ',' << format_double(c.noise_clip) << ','
         << c.policy_delay << ',' << c.batch_size << ',' << c.gradient_steps << ','
         << format_double(c.discount) << ',' << format_double(c.reward_scale) << ','
         << hidden_string(c.hidden);
      break;
    }
    case Algorithm::bcq: {
      const auto& c = p.bcq;
      os << format_double(c.q_lr) << ',' << format_double(c.threshold) << ','
         << format_double(c.tau) << ',' << c.target_update_period << ',' << c.batch_size << ','
         << c.gradient_steps << ',' << format_double(c.discount) << ','
         << format_double(c.reward_scale) << ',' << hidden_string(c.hidden) << ',' << c.n_bins;
      break;
    }
    case Algorithm::cql: {
      const auto& c = p.cql;
      os << format_double(c.q_lr) << ',' << format_double(c.cql_alpha) << ','
         << format_double(c.tau) << ',' << c.target_update_period << ',' << c.batch_size << ','
         << c.gradient_steps << ',' << format_double(c.discount) << ','
         << format_double(c.reward_scale) << ',' << hidden_string(c.hidden) << ',' << c.n_bins;
      break;
    }
    case Algorithm::pid:
      break;
  }
  return os.str();
}

std::string env_signature(const EnvConfig& e) {
  std::ostringstream os;
  os << format_double(e.episode.length_days) << ',' << format_double(e.episode.control_period)
     << ',' << format_double(e.meal_time_sd) << ',' << e.include_snacks << ','
     << format_double(e.bolus_scale) << ',' << format_double(e.sensor.noise_sd) << ','
     << format_double(e.sensor.noise_autocorrelation) << ',' << format_double(e.pump.basal_resolution)
     << ',' << format_double(e.integrator.substep_minutes);
  return os.str();
}

std::string policy_key(Algorithm algorithm, const PatientParams& patient, const PidParams& demo,
                       const ScenarioSetup& setup, const PipelineConfig& p,
                       std::uint64_t training_seed) {
  std::ostringstream os;
  os << to_string(algorithm) << '|' << patient.id << '|' << format_double(demo.kp) << ','
     << format_double(demo.ki) << ',' << format_double(demo.kd) << '|' << setup.n_samples << '|'
     << env_signature(setup.train_env) << '|' << format_double(p.carb_noise_sd) << ','
     << format_double(p.ou.theta) << ',' << format_double(p.ou.sigma) << ','
     << format_double(p.ou.mu) << '|' << training_seed << '|' << learner_signature(algorithm, p);
  return os.str();
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& scenario, const std::vector<Algorithm>& algorithms,
                            const std::vector<PatientParams>& patients,
                            const PipelineConfig& pipeline, PolicyCache* cache) {
  pipeline.validate();
  if (algorithms.empty()) throw ConfigError("no algorithms requested");
  if (patients.empty()) throw ConfigError("no patients requested");
  const ScenarioSetup setup = scenario_setup(scenario, pipeline);
  if (setup.demonstrator_rank > pipeline.grid.size()) {
    throw ConfigError("demonstrator rank exceeds grid size");
  }

  ScenarioResult result;
  result.scenario = scenario;
  for (const auto& patient : patients) {
    result.patient_ids.push_back(patient.id);
    result.demonstrators.push_back(
        tune_pid(pipeline.grid, patient, setup.demonstrator_rank, setup.train_env, pipeline.jobs));
  }

  std::vector<Algorithm> learners;
  for (auto a : algorithms) {
    if (a != Algorithm::pid) learners.push_back(a);
  }

  const std::size_t n_seeds = pipeline.training_seeds.size();
  const std::size_t n_tasks = patients.size() * n_seeds;
  // traces[task][learner]
  std::vector<std::vector<std::vector<RolloutTrace>>> traces(
      n_tasks, std::vector<std::vector<RolloutTrace>>(learners.size()));
  parallel_for(n_tasks, pipeline.jobs, [&](std::size_t task) {
    const std::size_t pi = task / n_seeds;
    const PatientParams& patient = patients[pi];
    const std::uint64_t training_seed = pipeline.training_seeds[task % n_seeds];
    std::optional<OfflineDataset> dataset;
    for (std::size_t li = 0; li < learners.size(); ++li) {
      const std::string key = policy_key(learners[li], patient, result.demonstrators[pi], setup,
                                         pipeline, training_seed);
      std::optional<rl::Policy> policy;
      if (cache) policy = cache->find(key);
      if (!policy) {
        if (!dataset) {
          dataset = build_transitions(generate_dataset(
              patient, result.demonstrators[pi], setup.n_samples, pipeline.ou,
              pipeline.carb_noise_sd, dataset_seed(patient, training_seed), setup.train_env));
        }
        policy = train_algorithm(learners[li], *dataset, pipeline,
                                 learner_seed(patient, training_seed))
                     .policy;
        if (cache) cache->insert(key, *policy);
      }
      traces[task][li] =
          evaluate_policy_traces(*policy, patient, pipeline.test_seeds, setup.eval_env);
    }
  });

  for (auto a : algorithms) {
    ScenarioPoint point;
    point.algorithm = a;
    if (a == Algorithm::pid) {
      for (std::size_t pi = 0; pi < patients.size(); ++pi) {
        auto t = evaluate_pid_traces(result.demonstrators[pi], patients[pi], pipeline.test_seeds,
                                     setup.eval_env);
        point.traces.insert(point.traces.end(), t.begin(), t.end());
      }
    } else {
      const auto li = static_cast<std::size_t>(
          std::find(learners.begin(), learners.end(), a) - learners.begin());
      for (std::size_t task = 0; task < n_tasks; ++task) {
        point.traces.insert(point.traces.end(), traces[task][li].begin(), traces[task][li].end());
      }
    }
    point.report = compute_metrics(point.traces);
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace glucolab
