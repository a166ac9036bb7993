#include "glucolab/data/dataset.hpp"

#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab {

FeatureVector NormalizationStats::standardize(const FeatureVector& x) const {
  FeatureVector out{};
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    out[i] = (x[i] - mean[i]) / (sd[i] + kStandardizeEpsilon);
  }
  return out;
}

NormalizationStats compute_normalization(const std::vector<Transition>& transitions) {
  NormalizationStats stats;
  if (transitions.empty()) return stats;
  const double n = static_cast<double>(transitions.size());
  for (const auto& t : transitions) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) stats.mean[i] += t.state[i];
  }
  for (auto& m : stats.mean) m /= n;
  for (const auto& t : transitions) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      const double d = t.state[i] - stats.mean[i];
      stats.sd[i] += d * d;
    }
  }
  for (auto& s : stats.sd) s = std::sqrt(s / n);
  return stats;
}

OfflineDataset build_transitions(const TrajectoryLog& log) {
  if (log.rows.empty()) throw FormatError("build_transitions: empty log");
  if (!(log.max_basal > 0.0)) throw FormatError("build_transitions: max_basal missing from log");
  log.validate();

  OfflineDataset ds;
  ds.transitions.reserve(log.rows.size());
  std::vector<double> cgm, basal, bolus, carbs;
  std::size_t begin = 0;
  while (begin < log.rows.size()) {
    std::size_t end = begin;
    while (end < log.rows.size() && log.rows[end].episode_id == log.rows[begin].episode_id) ++end;
    for (auto* c : {&cgm, &basal, &bolus, &carbs}) {
      c->clear();
      c->reserve(end - begin);
    }
    const auto features_upto = [&](std::size_t count) {
      const RawHistoryView view{std::span<const double>(cgm.data(), count),
                                std::span<const double>(basal.data(), count),
                                std::span<const double>(bolus.data(), count),
                                std::span<const double>(carbs.data(), count)};
      return featurize(view, log.control_period, log.padding);
    };
    FeatureVector state = features_upto(0);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = log.rows[i];
      cgm.push_back(r.cgm);
      basal.push_back(r.basal);
      bolus.push_back(r.bolus);
      carbs.push_back(r.true_carbs);
      Transition t;
      t.state = state;
      t.action = normalize_action(r.basal, log.max_basal);
      t.reward = r.reward;
      t.next_state = features_upto(cgm.size());
      t.done = r.done;
      state = t.next_state;
      ds.transitions.push_back(t);
    }
    begin = end;
  }
  ds.stats = compute_normalization(ds.transitions);
  ds.provenance = log.provenance;
  ds.provenance.set("transition_count", ds.transitions.size());
  return ds;
}

OfflineDataset make_dataset(std::vector<Transition> transitions, KeyValueDoc provenance) {
  OfflineDataset ds;
  ds.transitions = std::move(transitions);
  ds.stats = compute_normalization(ds.transitions);
  ds.provenance = std::move(provenance);
  ds.provenance.set("transition_count", ds.transitions.size());
  return ds;
}

OfflineDataset load_dataset(const std::filesystem::path& path) { return build_transitions(load_log(path)); }

}  // namespace glucolab
