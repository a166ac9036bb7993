#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glucolab/control/ou.hpp"
#include "glucolab/control/pid.hpp"
#include "glucolab/env/features.hpp"
#include "glucolab/env/glucose_env.hpp"
#include "glucolab/util/keyvalue.hpp"

namespace glucolab {

inline constexpr long long kLogFormatVersion = 1;

struct LogRow {
  std::size_t step_index = 0;
  std::size_t episode_id = 0;
  std::string patient_id;
  std::uint64_t seed = 0;
  double true_glucose = 0.0;     // mg/dl
  double cgm = 0.0;              // mg/dl
  double basal = 0.0;            // U/h
  double bolus = 0.0;            // U
  double true_carbs = 0.0;       // g
  double announced_carbs = 0.0;  // g
  double reward = 0.0;
  bool done = false;

  bool operator==(const LogRow&) const = default;
};

/// Raw per-step log plus what is needed to rebuild features from it.
struct TrajectoryLog {
  std::vector<LogRow> rows;
  HistoryPadding padding;        // pre-episode values used by featurize
  double control_period = 3.0;   // minutes
  double max_basal = 0.0;        // U/h, action normalization range
  KeyValueDoc provenance;        // demonstrator, noise, seeds, sample count

  /// Throws FormatError unless step indices are contiguous per episode and
  /// `done` appears only on an episode's final row.
  void validate() const;
};

bool operator==(const TrajectoryLog& a, const TrajectoryLog& b);

/// CSV text (header row, LF endings) of the rows.
std::string log_to_csv(const TrajectoryLog& log);

/// Writes `<path>` (CSV) and `<path>.meta` (sidecar with checksum) atomically.
void save_log(const std::filesystem::path& path, const TrajectoryLog& log);
/// Verifies version and checksum before parsing; never returns partial data.
TrajectoryLog load_log(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Rolls out consecutive episodes of PID + OU basal noise with noisy carb
/// announcements until exactly `n_samples` control steps are logged.
TrajectoryLog generate_dataset(const PatientParams& patient, const PidParams& demonstrator,
                               std::size_t n_samples, const OuParams& ou, double carb_noise_sd,
                               std::uint64_t seed, const EnvConfig& env_config = {});

}  // namespace glucolab
