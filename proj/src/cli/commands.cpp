#include "glucolab/cli/commands.hpp"

#include <algorithm>
#include <mutex>
#include <ostream>
#include <set>

#include "glucolab/control/tuner.hpp"
#include "glucolab/data/trajectory.hpp"
#include "glucolab/eval/evaluate.hpp"
#include "glucolab/eval/report_io.hpp"
#include "glucolab/util/errors.hpp"
#include "glucolab/util/hashing.hpp"
#include "glucolab/util/keyvalue.hpp"
#include "glucolab/util/parallel.hpp"

namespace glucolab::cli {

namespace {

constexpr int kPidFileVersion = 1;

class Progress {
 public:
  explicit Progress(std::ostream* out) : out_(out) {}
  void operator()(const std::string& message) {
    if (!out_) return;
    std::lock_guard lock(mutex_);
    *out_ << message << '\n' << std::flush;
  }

 private:
  std::ostream* out_;
  std::mutex mutex_;
};

RunConfig with_jobs(RunConfig config, const CommandOptions& options) {
  config.pipeline.jobs = std::max<std::size_t>(1, options.jobs);
  return config;
}

Manifest start_manifest(const std::string& command, const RunConfig& config) {
  Manifest m;
  m.command = command;
  m.config_sha256 = config.hash;
  return m;
}

void add_absolute_input(Manifest& m, const std::filesystem::path& path) {
  const auto abs = std::filesystem::absolute(path).lexically_normal();
  m.inputs.push_back({abs.string(), sha256_file(abs)});
}

void add_common_inputs(Manifest& m, const RunConfig& config) {
  add_absolute_input(m, config.cohort_file);
  if (config.meal_file) add_absolute_input(m, *config.meal_file);
}

/// An upstream artifact: must exist and match the hash its producer recorded.
FileDigest checked_input(const std::filesystem::path& run_dir, const std::string& upstream,
                         const std::string& path) {
  if (!std::filesystem::exists(run_dir / path)) {
    throw MissingArtifactError("missing '" + (run_dir / path).string() + "'; run `glucolab " +
                               upstream + "` with this config first");
  }
  const Manifest producer = load_manifest(run_dir, upstream);
  const FileDigest* recorded = producer.find_output(path);
  if (!recorded) {
    throw MissingArtifactError("'" + path + "' is not listed in the " + upstream +
                               " manifest; rerun `glucolab " + upstream + "`");
  }
  FileDigest actual = digest(run_dir, path);
  if (actual.sha256 != recorded->sha256) {
    throw ChecksumError("'" + path + "' does not match the hash recorded by " + upstream);
  }
  return actual;
}

std::vector<Algorithm> learners(const RunConfig& config) {
  std::vector<Algorithm> out;
  for (auto a : config.algorithms) {
    if (a != Algorithm::pid) out.push_back(a);
  }
  return out;
}

}  // namespace

std::string pid_file(const std::string& patient) { return "pid/" + patient + ".ini"; }

std::string dataset_file(const std::string& patient, std::uint64_t seed) {
  return "data/" + patient + "_seed" + std::to_string(seed) + ".csv";
}

std::string policy_file(Algorithm algorithm, const std::string& patient, std::uint64_t seed) {
  return "policies/" + to_string(algorithm) + "_" + patient + "_seed" + std::to_string(seed) +
         ".weights";
}

PidParams load_pid_rank(const std::filesystem::path& path, std::size_t rank) {
  const auto doc = KeyValueDoc::load(path);
  if (doc.get_int("format_version", 0) != kPidFileVersion || doc.get_string("kind", "") != "pid_params") {
    throw FormatError("'" + path.string() + "' is not a PID parameter file");
  }
  const std::string section = "rank_" + std::to_string(rank);
  if (!doc.has_section(section)) {
    throw MissingArtifactError("'" + path.string() + "' has no rank " + std::to_string(rank) +
                               "; add it to [pid] ranks and rerun tune-pid");
  }
  PidParams p;
  p.kp = doc.get_double(section + ".kp");
  p.ki = doc.get_double(section + ".ki");
  p.kd = doc.get_double(section + ".kd");
  p.g_target = doc.get_double(section + ".g_target_mg_dl");
  return p;
}

Manifest cmd_tune_pid(const RunConfig& raw, const CommandOptions& options) {
  const RunConfig config = with_jobs(raw, options);
  Progress progress(options.log);
  Manifest m = start_manifest("tune-pid", config);
  add_common_inputs(m, config);
  std::set<std::size_t> ranks(config.pid_ranks.begin(), config.pid_ranks.end());
  ranks.insert(1);
  ranks.insert(config.demonstrator_rank);
  std::filesystem::create_directories(options.out_dir / "pid");
  for (const auto& patient : selected_patients(config)) {
    progress("tune-pid: " + patient.id + " (" + std::to_string(config.pipeline.grid.size()) +
             " grid points)");
    const auto ranked =
        rank_pid_grid(config.pipeline.grid, patient, config.pipeline.env, config.pipeline.jobs);
    KeyValueDoc doc;
    doc.set("format_version", kPidFileVersion);
    doc.set("kind", "pid_params");
    doc.set("patient", patient.id);
    doc.set("grid_points", ranked.size());
    doc.set("grid_seed", std::to_string(config.pipeline.grid.seed));
    for (std::size_t r : ranks) {
      const auto& entry = ranked.at(r - 1);
      const std::string s = "rank_" + std::to_string(r);
      doc.set(s + ".kp", entry.params.kp);
      doc.set(s + ".ki", entry.params.ki);
      doc.set(s + ".kd", entry.params.kd);
      doc.set(s + ".g_target_mg_dl", entry.params.g_target);
      doc.set(s + ".total_reward", entry.total_reward);
    }
    const std::string rel = pid_file(patient.id);
    write_file_atomic(options.out_dir / rel, doc.to_string());
    m.outputs.push_back(digest(options.out_dir, rel));
  }
  save_manifest(options.out_dir, m);
  return m;
}

Manifest cmd_generate(const RunConfig& raw, const CommandOptions& options) {
  const RunConfig config = with_jobs(raw, options);
  Progress progress(options.log);
  Manifest m = start_manifest("generate", config);
  add_common_inputs(m, config);
  const auto patients = selected_patients(config);
  std::vector<PidParams> demonstrators;
  for (const auto& p : patients) {
    m.inputs.push_back(checked_input(options.out_dir, "tune-pid", pid_file(p.id)));
    demonstrators.push_back(
        load_pid_rank(options.out_dir / pid_file(p.id), config.demonstrator_rank));
  }
  std::filesystem::create_directories(options.out_dir / "data");
  const auto& seeds = config.pipeline.training_seeds;
  parallel_for(patients.size() * seeds.size(), config.pipeline.jobs, [&](std::size_t task) {
    const auto& patient = patients[task / seeds.size()];
    const std::uint64_t seed = seeds[task % seeds.size()];
    progress("generate: " + patient.id + " seed " + std::to_string(seed) + " (" +
             std::to_string(config.pipeline.n_samples) + " samples)");
    const auto log = generate_dataset(patient, demonstrators[task / seeds.size()],
                                      config.pipeline.n_samples, config.pipeline.ou,
                                      config.pipeline.carb_noise_sd, dataset_seed(patient, seed),
                                      config.pipeline.env);
    save_log(options.out_dir / dataset_file(patient.id, seed), log);
  });
  for (const auto& p : patients) {
    for (auto seed : seeds) {
      const std::string rel = dataset_file(p.id, seed);
      m.outputs.push_back(digest(options.out_dir, rel));
      m.outputs.push_back(digest(options.out_dir, rel + ".meta"));
    }
  }
  save_manifest(options.out_dir, m);
  return m;
}

Manifest cmd_train(const RunConfig& raw, const CommandOptions& options) {
  const RunConfig config = with_jobs(raw, options);
  Progress progress(options.log);
  Manifest m = start_manifest("train", config);
  const auto algorithms = learners(config);
  if (algorithms.empty()) throw ConfigError("train: no learning algorithm in [run] algorithms");
  const auto patients = selected_patients(config);
  const auto& seeds = config.pipeline.training_seeds;
  for (const auto& p : patients) {
    for (auto seed : seeds) {
      const std::string rel = dataset_file(p.id, seed);
      m.inputs.push_back(checked_input(options.out_dir, "generate", rel));
      m.inputs.push_back(checked_input(options.out_dir, "generate", rel + ".meta"));
    }
  }
  std::filesystem::create_directories(options.out_dir / "policies");
  const std::size_t per_patient = seeds.size() * algorithms.size();
  parallel_for(patients.size() * per_patient, config.pipeline.jobs, [&](std::size_t task) {
    const auto& patient = patients[task / per_patient];
    const std::uint64_t seed = seeds[(task % per_patient) / algorithms.size()];
    const Algorithm algorithm = algorithms[task % algorithms.size()];
    progress("train: " + to_string(algorithm) + " " + patient.id + " seed " + std::to_string(seed));
    const auto dataset = build_transitions(load_log(options.out_dir / dataset_file(patient.id, seed)));
    const auto result =
        train_algorithm(algorithm, dataset, config.pipeline, learner_seed(patient, seed));
    rl::save_policy(options.out_dir / policy_file(algorithm, patient.id, seed), result.policy);
  });
  for (const auto& p : patients) {
    for (auto seed : seeds) {
      for (auto a : algorithms) m.outputs.push_back(digest(options.out_dir, policy_file(a, p.id, seed)));
    }
  }
  save_manifest(options.out_dir, m);
  return m;
}

Manifest cmd_evaluate(const RunConfig& raw, const CommandOptions& options) {
  const RunConfig config = with_jobs(raw, options);
  Progress progress(options.log);
  Manifest m = start_manifest("evaluate", config);
  add_common_inputs(m, config);
  const auto patients = selected_patients(config);
  const auto& pipeline = config.pipeline;
  std::vector<ReportRow> rows;
  for (auto algorithm : config.algorithms) {
    std::vector<std::vector<RolloutTrace>> per_patient(patients.size());
    if (algorithm == Algorithm::pid) {
      for (const auto& p : patients) m.inputs.push_back(checked_input(options.out_dir, "tune-pid", pid_file(p.id)));
    } else {
      for (const auto& p : patients) {
        for (auto seed : pipeline.training_seeds) {
          m.inputs.push_back(checked_input(options.out_dir, "train", policy_file(algorithm, p.id, seed)));
        }
      }
    }
    parallel_for(patients.size(), pipeline.jobs, [&](std::size_t i) {
      const auto& patient = patients[i];
      progress("evaluate: " + to_string(algorithm) + " " + patient.id);
      if (algorithm == Algorithm::pid) {
        const auto pid = load_pid_rank(options.out_dir / pid_file(patient.id), 1);
        per_patient[i] = evaluate_pid_traces(pid, patient, pipeline.test_seeds, pipeline.env);
        return;
      }
      for (auto seed : pipeline.training_seeds) {
        const auto policy = rl::load_policy(options.out_dir / policy_file(algorithm, patient.id, seed));
        auto t = evaluate_policy_traces(policy, patient, pipeline.test_seeds, pipeline.env);
        per_patient[i].insert(per_patient[i].end(), t.begin(), t.end());
      }
    });
    std::vector<RolloutTrace> all;
    for (const auto& t : per_patient) all.insert(all.end(), t.begin(), t.end());
    const auto pooled = report_rows("standard", 0.0, to_string(algorithm), compute_metrics(all));
    rows.insert(rows.end(), pooled.begin(), pooled.end());
    for (std::size_t i = 0; i < patients.size(); ++i) {
      auto r = report_rows("standard", 0.0, to_string(algorithm), compute_metrics(per_patient[i]));
      r.front().group = patients[i].id;
      rows.push_back(r.front());
    }
  }
  std::filesystem::create_directories(options.out_dir / "reports");
  save_report(options.out_dir / kEvaluationReport, rows);
  write_file_atomic(options.out_dir / kEvaluationSummary, format_summary(rows));
  for (std::string rel : {std::string(kEvaluationReport), std::string(kEvaluationReport) + ".meta",
                          std::string(kEvaluationSummary)}) {
    m.outputs.push_back(digest(options.out_dir, rel));
  }
  save_manifest(options.out_dir, m);
  return m;
}

Manifest cmd_scenario(const RunConfig& raw, const CommandOptions& options) {
  const RunConfig config = with_jobs(raw, options);
  Progress progress(options.log);
  Manifest m = start_manifest("scenario", config);
  add_common_inputs(m, config);
  const auto patients = selected_patients(config);
  std::vector<double> parameters = config.scenario_parameters;
  if (parameters.empty()) parameters = scenario_grid(config.scenario_kind);
  if (parameters.empty()) parameters = {0.0};
  PolicyCache cache;
  std::vector<ReportRow> rows;
  for (double parameter : parameters) {
    const ScenarioConfig scenario{config.scenario_kind, parameter};
    progress("scenario: " + to_string(scenario.kind) + " parameter " + format_double(parameter));
    const auto result = run_scenario(scenario, config.algorithms, patients, config.pipeline, &cache);
    const auto r = report_rows(result);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::filesystem::create_directories(options.out_dir / "figures");
  const std::string figure = "figures/" + figure_file_name(config.scenario_kind);
  const std::string summary = "figures/" + to_string(config.scenario_kind) + "_summary.txt";
  save_report(options.out_dir / figure, rows);
  write_file_atomic(options.out_dir / summary, format_summary(rows));
  for (const auto& rel : {figure, figure + ".meta", summary}) {
    m.outputs.push_back(digest(options.out_dir, rel));
  }
  save_manifest(options.out_dir, m);
  return m;
}

std::size_t cmd_verify(const std::filesystem::path& run_dir, std::ostream* log) {
  std::size_t checked = 0;
  const auto issues = verify_run(run_dir, &checked);
  if (!issues.empty()) {
    std::string message = "verify: " + std::to_string(issues.size()) + " problem(s)";
    for (const auto& i : issues) message += "\n  [" + i.manifest + "] " + i.path + ": " + i.problem;
    throw ChecksumError(message);
  }
  if (log) *log << "verify: " << checked << " files ok\n";
  return checked;
}

}  // namespace glucolab::cli
