#include "glucolab/data/trajectory.hpp"

#include <charconv>
#include <sstream>

#include "glucolab/control/pid_controller.hpp"
#include "glucolab/util/errors.hpp"
#include "glucolab/util/hashing.hpp"

namespace glucolab {

namespace {

constexpr std::string_view kCsvHeader =
    "step_index,episode_id,patient_id,seed,true_glucose_mg_dl,cgm_mg_dl,basal_u_h,bolus_u,"
    "true_carbs_g,announced_carbs_g,reward,done";
constexpr std::size_t kCsvColumns = 12;
enum : std::uint64_t { kPidNoiseStream = 10 };

template <typename T>
T parse_integer(std::string_view text, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("log: bad integer '" + std::string(text) + "' on line " + std::to_string(line));
  }
  return value;
}

double parse_real(std::string_view text, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("log: bad number '" + std::string(text) + "' on line " + std::to_string(line));
  }
  return value;
}

}  // namespace

void TrajectoryLog::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool new_episode = i == 0 || rows[i - 1].episode_id != r.episode_id;
    if (new_episode) {
      if (r.step_index != 0) throw FormatError("log: episode does not start at step 0");
    } else {
      if (r.step_index != rows[i - 1].step_index + 1) {
        throw FormatError("log: non-contiguous step index at row " + std::to_string(i));
      }
      if (rows[i - 1].done) throw FormatError("log: done flag before end of episode");
    }
  }
}

bool operator==(const TrajectoryLog& a, const TrajectoryLog& b) {
  return a.rows == b.rows && a.padding.cgm == b.padding.cgm && a.padding.basal == b.padding.basal &&
         a.control_period == b.control_period && a.max_basal == b.max_basal &&
         a.provenance.to_string() == b.provenance.to_string();
}

std::string log_to_csv(const TrajectoryLog& log) {
  std::string out(kCsvHeader);
  out += '\n';
  out.reserve(log.rows.size() * 110);
  for (const auto& r : log.rows) {
    out += std::to_string(r.step_index) + ',' + std::to_string(r.episode_id) + ',' + r.patient_id +
           ',' + std::to_string(r.seed) + ',' + format_double(r.true_glucose) + ',' +
           format_double(r.cgm) + ',' + format_double(r.basal) + ',' + format_double(r.bolus) + ',' +
           format_double(r.true_carbs) + ',' + format_double(r.announced_carbs) + ',' +
           format_double(r.reward) + ',' + (r.done ? '1' : '0') + '\n';
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto meta = path;
  meta += ".meta";
  return meta;
}

void save_log(const std::filesystem::path& path, const TrajectoryLog& log) {
  log.validate();
  const std::string csv = log_to_csv(log);
  KeyValueDoc meta;
  meta.set("format_version", kLogFormatVersion);
  meta.set("kind", "trajectory_log");
  meta.set("rows", log.rows.size());
  meta.set("sha256", sha256_hex(csv));
  meta.set("padding_cgm_mg_dl", log.padding.cgm);
  meta.set("padding_basal_u_h", log.padding.basal);
  meta.set("control_period_minutes", log.control_period);
  meta.set("max_basal_u_h", log.max_basal);
  for (const auto& [key, value] : log.provenance.tree()) {
    meta.set("provenance." + key, value.data());
  }
  write_file_atomic(path, csv);
  meta.save(sidecar_path(path));
}

TrajectoryLog load_log(const std::filesystem::path& path) {
  const auto meta = KeyValueDoc::load(sidecar_path(path));
  if (meta.get_int("format_version") != kLogFormatVersion ||
      meta.get_string("kind") != "trajectory_log") {
    throw FormatError("log: unsupported format version or kind in '" + path.string() + ".meta'");
  }
  const std::string csv = read_file(path);
  if (sha256_hex(csv) != meta.get_string("sha256")) {
    throw ChecksumError("log: checksum mismatch for '" + path.string() + "'");
  }

  TrajectoryLog log;
  log.padding.cgm = meta.get_double("padding_cgm_mg_dl");
  log.padding.basal = meta.get_double("padding_basal_u_h");
  log.control_period = meta.get_double("control_period_minutes");
  log.max_basal = meta.get_double("max_basal_u_h");
  if (meta.has_section("provenance")) log.provenance = meta.section("provenance");

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  if (line != kCsvHeader) throw FormatError("log: unexpected header in '" + path.string() + "'");
  const auto expected_rows = static_cast<std::size_t>(meta.get_int("rows"));
  log.rows.reserve(expected_rows);
  std::size_t line_no = 1;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    fields.clear();
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    if (fields.size() != kCsvColumns) {
      throw FormatError("log: wrong column count on line " + std::to_string(line_no));
    }
    LogRow r;
    r.step_index = parse_integer<std::size_t>(fields[0], line_no);
    r.episode_id = parse_integer<std::size_t>(fields[1], line_no);
    r.patient_id = std::string(fields[2]);
    r.seed = parse_integer<std::uint64_t>(fields[3], line_no);
    r.true_glucose = parse_real(fields[4], line_no);
    r.cgm = parse_real(fields[5], line_no);
    r.basal = parse_real(fields[6], line_no);
    r.bolus = parse_real(fields[7], line_no);
    r.true_carbs = parse_real(fields[8], line_no);
    r.announced_carbs = parse_real(fields[9], line_no);
    r.reward = parse_real(fields[10], line_no);
    if (fields[11] != "0" && fields[11] != "1") {
      throw FormatError("log: bad done flag on line " + std::to_string(line_no));
    }
    r.done = fields[11] == "1";
    log.rows.push_back(std::move(r));
  }
  if (log.rows.size() != expected_rows) throw FormatError("log: row count differs from sidecar");
  log.validate();
  return log;
}

TrajectoryLog generate_dataset(const PatientParams& patient, const PidParams& demonstrator,
                               std::size_t n_samples, const OuParams& ou, double carb_noise_sd,
                               std::uint64_t seed, const EnvConfig& env_config) {
  if (n_samples == 0) throw ConfigError("generate_dataset: n_samples must be > 0");
  EnvConfig config = env_config;
  config.carb_noise_sd = carb_noise_sd;
  GlucoseEnv env(patient, config, seed);
  PidController controller(demonstrator, ou, derive_seed(seed, kPidNoiseStream));

  TrajectoryLog log;
  log.padding = env.padding();
  log.control_period = config.episode.control_period;
  log.max_basal = patient.max_basal;
  log.rows.reserve(n_samples);
  std::size_t episode = 0;
  while (log.rows.size() < n_samples) {
    if (episode > 0) env.reset();
    controller.reset();
    while (!env.done() && log.rows.size() < n_samples) {
      const auto rec = env.step(controller.act(env));
      LogRow row;
      row.step_index = rec.step_index;
      row.episode_id = episode;
      row.patient_id = patient.id;
      row.seed = seed;
      row.true_glucose = rec.true_glucose;
      row.cgm = rec.cgm;
      row.basal = rec.basal;
      row.bolus = rec.bolus;
      row.true_carbs = rec.true_carbs;
      row.announced_carbs = rec.announced_carbs;
      row.reward = rec.reward;
      row.done = rec.done;
      log.rows.push_back(std::move(row));
    }
    ++episode;
  }

  auto& p = log.provenance;
  p.set("patient_id", patient.id);
  p.set("demonstrator", "pid");
  p.set("pid_kp", demonstrator.kp);
  p.set("pid_ki", demonstrator.ki);
  p.set("pid_kd", demonstrator.kd);
  p.set("pid_g_target_mg_dl", demonstrator.g_target);
  p.set("ou_theta_per_step", ou.theta);
  p.set("ou_sigma_u_h", ou.sigma);
  p.set("ou_mu_u_h", ou.mu);
  p.set("carb_noise_sd", carb_noise_sd);
  p.set("meal_time_sd_minutes", config.meal_time_sd);
  p.set("include_snacks", config.include_snacks);
  p.set("seed", std::to_string(seed));
  p.set("sample_count", n_samples);
  p.set("episodes", episode);
  return log;
}

}  // namespace glucolab
