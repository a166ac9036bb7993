#pragma once

#include <filesystem>
#include <vector>

#include "glucolab/data/trajectory.hpp"
#include "glucolab/env/features.hpp"

namespace glucolab {

struct Transition {
  FeatureVector state{};
  double action = 0.0;  // normalized basal in [-1, 1]
  double reward = 0.0;
  FeatureVector next_state{};
  bool done = false;

  bool operator==(const Transition&) const = default;
};

/// Per-dimension z-score statistics (population sd).
struct NormalizationStats {
  FeatureVector mean{};
  FeatureVector sd{};

  /// (x - mean) / (sd + 1e-3)
  FeatureVector standardize(const FeatureVector& x) const;
  bool operator==(const NormalizationStats&) const = default;
};

inline constexpr double kStandardizeEpsilon = 1e-3;

NormalizationStats compute_normalization(const std::vector<Transition>& transitions);

struct OfflineDataset {
  std::vector<Transition> transitions;
  NormalizationStats stats;
  KeyValueDoc provenance;

  std::size_t size() const { return transitions.size(); }
};

/// Rebuilds features from the raw log (never crossing episode boundaries),
/// normalizes actions, and computes normalization statistics.
OfflineDataset build_transitions(const TrajectoryLog& log);

/// Builds a dataset from transitions already in hand (synthetic MDPs, tests).
OfflineDataset make_dataset(std::vector<Transition> transitions, KeyValueDoc provenance = {});

/// load_log followed by build_transitions.
OfflineDataset load_dataset(const std::filesystem::path& path);

}  // namespace glucolab
