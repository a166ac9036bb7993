#include "glucolab/cli/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "glucolab/util/errors.hpp"
#include "glucolab/util/hashing.hpp"

namespace glucolab::cli {

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run",
       {"cohort_file", "meal_file", "patients", "algorithms", "training_seeds", "test_seeds"}},
      {"env",
       {"episode_length_days", "control_period_minutes", "meal_time_sd_minutes", "include_snacks",
        "bolus_scale", "sensor_noise_sd_mg_dl", "sensor_noise_autocorrelation",
        "integrator_substep_minutes"}},
      {"pid", {"ranks", "grid_seed", "grid_episode_days", "kp_values", "ki_values", "kd_values"}},
      {"dataset",
       {"n_samples", "demonstrator_rank", "carb_noise_sd_fraction", "ou_theta_per_step",
        "ou_sigma_u_h", "ou_mu_u_h"}},
      {"td3bc",
       {"actor_lr", "critic_lr", "alpha", "tau", "policy_noise", "noise_clip", "policy_delay_steps",
        "batch_size", "gradient_steps", "discount", "reward_scale", "hidden_units"}},
      {"bcq",
       {"q_lr", "threshold", "tau", "target_update_period_steps", "batch_size", "gradient_steps",
        "discount", "reward_scale", "hidden_units", "action_bins"}},
      {"cql",
       {"q_lr", "cql_alpha", "tau", "target_update_period_steps", "batch_size", "gradient_steps",
        "discount", "reward_scale", "hidden_units", "action_bins"}},
      {"scenario", {"kind", "parameters"}},
  };
  return keys;
}

void check_keys(const KeyValueDoc& doc) {
  for (const auto& [name, child] : doc.tree()) {
    auto it = allowed_keys().find(name);
    if (child.empty()) throw ConfigError("config: key '" + name + "' must be inside a section");
    if (it == allowed_keys().end()) throw ConfigError("config: unknown section [" + name + "]");
    for (const auto& [key, value] : child) {
      if (!it->second.count(key)) {
        throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
      }
    }
  }
}

std::size_t get_count(const KeyValueDoc& doc, const std::string& key, std::size_t fallback) {
  const double v = doc.get_double(key, static_cast<double>(fallback));
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw ConfigError("config: '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> get_counts(const KeyValueDoc& doc, const std::string& key,
                                    std::vector<std::size_t> fallback) {
  if (!doc.has(key)) return fallback;
  std::vector<std::size_t> out;
  for (double v : doc.get_doubles(key)) {
    if (!(v >= 0.0) || v != std::floor(v)) {
      throw ConfigError("config: '" + key + "' must list non-negative integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<std::uint64_t> get_seeds(const KeyValueDoc& doc, const std::string& key,
                                     std::vector<std::uint64_t> fallback) {
  if (!doc.has(key)) return fallback;
  std::vector<std::uint64_t> out;
  for (const auto& s : doc.get_strings(key)) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(s, &pos);
      if (pos != s.size() || s.front() == '-') throw std::invalid_argument(s);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("config: '" + key + "' must list non-negative integer seeds, got '" + s + "'");
    }
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& path) {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

void RunConfig::validate() const {
  pipeline.validate();
  if (patients.empty()) throw ConfigError("config: [run] patients is empty");
  if (algorithms.empty()) throw ConfigError("config: [run] algorithms is empty");
  for (std::size_t r : pid_ranks) {
    if (r < 1 || r > pipeline.grid.size()) throw ConfigError("config: PID rank out of range");
  }
  if (demonstrator_rank < 1 || demonstrator_rank > pipeline.grid.size()) {
    throw ConfigError("config: demonstrator_rank out of range");
  }
  for (double p : scenario_parameters) ScenarioConfig{scenario_kind, p}.validate();
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const std::string& origin) {
  const KeyValueDoc doc = KeyValueDoc::parse(text, origin);
  check_keys(doc);
  RunConfig c;
  c.hash = sha256_hex(text);

  if (doc.has("run.cohort_file")) c.cohort_file = resolve(base_dir, doc.get_string("run.cohort_file"));
  if (doc.has("run.meal_file")) c.meal_file = resolve(base_dir, doc.get_string("run.meal_file"));
  if (!doc.has("run.patients")) throw ConfigError("config: [run] patients is required");
  c.patients = doc.get_strings("run.patients");
  if (doc.has("run.algorithms")) {
    c.algorithms.clear();
    for (const auto& a : doc.get_strings("run.algorithms")) c.algorithms.push_back(parse_algorithm(a));
  }
  auto& p = c.pipeline;
  p.training_seeds = get_seeds(doc, "run.training_seeds", p.training_seeds);
  p.test_seeds = get_seeds(doc, "run.test_seeds", p.test_seeds);

  auto& e = p.env;
  e.episode.length_days = doc.get_double("env.episode_length_days", e.episode.length_days);
  e.episode.control_period = doc.get_double("env.control_period_minutes", e.episode.control_period);
  e.meal_time_sd = doc.get_double("env.meal_time_sd_minutes", e.meal_time_sd);
  e.include_snacks = doc.get_bool("env.include_snacks", e.include_snacks);
  e.bolus_scale = doc.get_double("env.bolus_scale", e.bolus_scale);
  e.sensor.noise_sd = doc.get_double("env.sensor_noise_sd_mg_dl", e.sensor.noise_sd);
  e.sensor.noise_autocorrelation =
      doc.get_double("env.sensor_noise_autocorrelation", e.sensor.noise_autocorrelation);
  e.integrator.substep_minutes =
      doc.get_double("env.integrator_substep_minutes", e.integrator.substep_minutes);
  if (c.meal_file) e.meals = load_meal_profile(*c.meal_file);

  c.pid_ranks = get_counts(doc, "pid.ranks", c.pid_ranks);
  p.grid.seed = get_seeds(doc, "pid.grid_seed", {p.grid.seed}).at(0);
  p.grid.episode_days = doc.get_double("pid.grid_episode_days", p.grid.episode_days);
  if (doc.has("pid.kp_values")) p.grid.kp_values = doc.get_doubles("pid.kp_values");
  if (doc.has("pid.ki_values")) p.grid.ki_values = doc.get_doubles("pid.ki_values");
  if (doc.has("pid.kd_values")) p.grid.kd_values = doc.get_doubles("pid.kd_values");

  p.n_samples = get_count(doc, "dataset.n_samples", p.n_samples);
  c.demonstrator_rank = get_count(doc, "dataset.demonstrator_rank", c.demonstrator_rank);
  p.carb_noise_sd = doc.get_double("dataset.carb_noise_sd_fraction", p.carb_noise_sd);
  p.ou.theta = doc.get_double("dataset.ou_theta_per_step", p.ou.theta);
  p.ou.sigma = doc.get_double("dataset.ou_sigma_u_h", p.ou.sigma);
  p.ou.mu = doc.get_double("dataset.ou_mu_u_h", p.ou.mu);

  auto& t = p.td3bc;
  t.actor_lr = doc.get_double("td3bc.actor_lr", t.actor_lr);
  t.critic_lr = doc.get_double("td3bc.critic_lr", t.critic_lr);
  t.alpha = doc.get_double("td3bc.alpha", t.alpha);
  t.tau = doc.get_double("td3bc.tau", t.tau);
  t.policy_noise = doc.get_double("td3bc.policy_noise", t.policy_noise);
  t.noise_clip = doc.get_double("td3bc.noise_clip", t.noise_clip);
  t.policy_delay = get_count(doc, "td3bc.policy_delay_steps", t.policy_delay);
  t.batch_size = get_count(doc, "td3bc.batch_size", t.batch_size);
  t.gradient_steps = get_count(doc, "td3bc.gradient_steps", t.gradient_steps);
  t.discount = doc.get_double("td3bc.discount", t.discount);
  t.reward_scale = doc.get_double("td3bc.reward_scale", t.reward_scale);
  t.hidden = get_counts(doc, "td3bc.hidden_units", t.hidden);

  auto& b = p.bcq;
  b.q_lr = doc.get_double("bcq.q_lr", b.q_lr);
  b.threshold = doc.get_double("bcq.threshold", b.threshold);
  b.tau = doc.get_double("bcq.tau", b.tau);
  b.target_update_period = get_count(doc, "bcq.target_update_period_steps", b.target_update_period);
  b.batch_size = get_count(doc, "bcq.batch_size", b.batch_size);
  b.gradient_steps = get_count(doc, "bcq.gradient_steps", b.gradient_steps);
  b.discount = doc.get_double("bcq.discount", b.discount);
  b.reward_scale = doc.get_double("bcq.reward_scale", b.reward_scale);
  b.hidden = get_counts(doc, "bcq.hidden_units", b.hidden);
  b.n_bins = get_count(doc, "bcq.action_bins", b.n_bins);

  auto& q = p.cql;
  q.q_lr = doc.get_double("cql.q_lr", q.q_lr);
  q.cql_alpha = doc.get_double("cql.cql_alpha", q.cql_alpha);
  q.tau = doc.get_double("cql.tau", q.tau);
  q.target_update_period = get_count(doc, "cql.target_update_period_steps", q.target_update_period);
  q.batch_size = get_count(doc, "cql.batch_size", q.batch_size);
  q.gradient_steps = get_count(doc, "cql.gradient_steps", q.gradient_steps);
  q.discount = doc.get_double("cql.discount", q.discount);
  q.reward_scale = doc.get_double("cql.reward_scale", q.reward_scale);
  q.hidden = get_counts(doc, "cql.hidden_units", q.hidden);
  q.n_bins = get_count(doc, "cql.action_bins", q.n_bins);

  if (doc.has("scenario.kind")) c.scenario_kind = parse_scenario_kind(doc.get_string("scenario.kind"));
  if (doc.has("scenario.parameters")) c.scenario_parameters = doc.get_doubles("scenario.parameters");

  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("config file not found: '" + path.string() + "'");
  }
  return parse_run_config(read_file(path), path.parent_path().empty() ? "." : path.parent_path(),
                          path.string());
}

void apply_seed_override(RunConfig& config, std::uint64_t seed) {
  config.pipeline.training_seeds = {seed};
  config.hash = sha256_hex(config.hash + "\nseed_override=" + std::to_string(seed));
}

std::vector<PatientParams> selected_patients(const RunConfig& config) {
  const auto cohort = load_cohort(config.cohort_file);
  std::vector<PatientParams> out;
  for (const auto& id : config.patients) out.push_back(find_patient(cohort, id));
  return out;
}

}  // namespace glucolab::cli
