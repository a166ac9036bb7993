#include "glucolab/eval/metrics.hpp"

#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab {

RolloutMetrics rollout_metrics(const RolloutTrace& trace) {
  if (trace.cgm.empty()) throw Error("metrics: empty trace");
  RolloutMetrics m;
  std::size_t in_range = 0, below = 0, above = 0;
  double sum = 0.0;
  for (double g : trace.cgm) {
    if (g < kRangeLow) {
      ++below;
    } else if (g > kRangeHigh) {
      ++above;
    } else {
      ++in_range;
    }
    sum += g;
  }
  const double n = static_cast<double>(trace.cgm.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (double g : trace.cgm) sq += (g - mean) * (g - mean);
  m.tir_pct = 100.0 * static_cast<double>(in_range) / n;
  m.tbr_pct = 100.0 * static_cast<double>(below) / n;
  m.tar_pct = 100.0 * static_cast<double>(above) / n;
  m.cv_pct = 100.0 * std::sqrt(sq / n) / mean;
  m.reward_sum = trace.reward_sum;
  for (double g : trace.true_glucose) {
    if (g < kFailureLow || g > kFailureHigh) m.failed = true;
  }
  return m;
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() >= 2) {
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(sq / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

namespace {

template <typename Report>
void fill(Report& r, const std::vector<RolloutMetrics>& metrics) {
  std::vector<double> reward, tir, tbr, cv, failure;
  for (const auto& m : metrics) {
    reward.push_back(m.reward_sum);
    tir.push_back(m.tir_pct);
    tbr.push_back(m.tbr_pct);
    cv.push_back(m.cv_pct);
    failure.push_back(m.failed ? 100.0 : 0.0);
  }
  r.reward_sum = mean_se(reward);
  r.tir_pct = mean_se(tir);
  r.tbr_pct = mean_se(tbr);
  r.cv_pct = mean_se(cv);
  r.failure_pct = mean_se(failure);
  r.n_rollouts = metrics.size();
}

}  // namespace

GlycemicReport compute_metrics(const std::vector<RolloutTrace>& traces) {
  if (traces.empty()) throw Error("metrics: no rollouts");
  std::vector<RolloutMetrics> all;
  all.reserve(traces.size());
  for (const auto& t : traces) all.push_back(rollout_metrics(t));
  GlycemicReport report;
  fill(report, all);
  for (AgeGroup g : {AgeGroup::adult, AgeGroup::adolescent, AgeGroup::child}) {
    std::vector<RolloutMetrics> subset;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      if (traces[i].age_group == g) subset.push_back(all[i]);
    }
    if (subset.empty()) continue;
    GroupReport gr;
    gr.age_group = g;
    fill(gr, subset);
    report.by_age_group.push_back(gr);
  }
  return report;
}

ClinicalFlags clinical_flags(const GlycemicReport& report) {
  return {report.tir_pct.mean > 70.0, report.tbr_pct.mean < 4.0, report.cv_pct.mean < 36.0,
          report.failure_pct.mean == 0.0};
}

}  // namespace glucolab
