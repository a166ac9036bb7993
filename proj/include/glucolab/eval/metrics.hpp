#pragma once

#include <string>
#include <vector>

#include "glucolab/sim/patient.hpp"

namespace glucolab {

inline constexpr double kRangeLow = 70.0;    // mg/dl, in range
inline constexpr double kRangeHigh = 180.0;  // mg/dl, in range
inline constexpr double kFailureLow = 10.0;
inline constexpr double kFailureHigh = 1000.0;

/// One evaluation rollout.
struct RolloutTrace {
  std::string patient_id;
  AgeGroup age_group = AgeGroup::adult;
  std::vector<double> cgm;           // mg/dl, one per control step
  std::vector<double> true_glucose;  // mg/dl, one per control step
  double reward_sum = 0.0;
};

struct RolloutMetrics {
  double tir_pct = 0.0;  // 70 <= g <= 180
  double tbr_pct = 0.0;  // g < 70
  double tar_pct = 0.0;  // g > 180
  double cv_pct = 0.0;   // 100 * population sd / mean
  double reward_sum = 0.0;
  bool failed = false;   // true glucose left [10, 1000]
};

/// Metrics of one rollout: TIR/TBR/TAR/CV on CGM readings, failure on true glucose.
RolloutMetrics rollout_metrics(const RolloutTrace& trace);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sample sd / sqrt(n); 0 for n < 2
};

MeanSe mean_se(const std::vector<double>& values);

struct GroupReport;

struct GlycemicReport {
  MeanSe reward_sum;
  MeanSe tir_pct;
  MeanSe tbr_pct;
  MeanSe cv_pct;
  MeanSe failure_pct;
  std::size_t n_rollouts = 0;
  std::vector<GroupReport> by_age_group;
};

struct GroupReport {
  AgeGroup age_group = AgeGroup::adult;
  MeanSe reward_sum, tir_pct, tbr_pct, cv_pct, failure_pct;
  std::size_t n_rollouts = 0;
};

/// Per-rollout metrics averaged across rollouts, with standard errors.
/// Throws on an empty list or an empty trace.
GlycemicReport compute_metrics(const std::vector<RolloutTrace>& traces);

/// Annotations against clinical targets; never alters the report.
struct ClinicalFlags {
  bool tir_ok = false;      // > 70 %
  bool tbr_ok = false;      // < 4 %
  bool cv_ok = false;       // < 36 %
  bool failure_ok = false;  // == 0 %
};

ClinicalFlags clinical_flags(const GlycemicReport& report);

}  // namespace glucolab
