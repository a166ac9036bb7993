#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

namespace glucolab {

inline constexpr std::size_t kGlucoseHistoryLength = 10;
inline constexpr std::size_t kGlucoseHistoryStride = 10;  // control steps (30 min)
inline constexpr std::size_t kActivityWindow = 80;        // control steps (4 h)
inline constexpr std::size_t kFeatureDim = kGlucoseHistoryLength + 2;

/// [g_0, g_-10, ..., g_-90, I_t, M_t], most recent reading first.
using FeatureVector = std::array<double, kFeatureDim>;

inline constexpr std::size_t kInsulinActivityIndex = kGlucoseHistoryLength;
inline constexpr std::size_t kCarbActivityIndex = kGlucoseHistoryLength + 1;

/// Values assumed for steps before the start of an episode.
struct HistoryPadding {
  double cgm = 0.0;    // mg/dl
  double basal = 0.0;  // U/h
};

/// Per-step raw signals; the last element of each span is the most recent
/// completed control step. All spans must have the same length.
struct RawHistoryView {
  std::span<const double> cgm;    // mg/dl, read at the end of each step
  std::span<const double> basal;  // U/h delivered during the step
  std::span<const double> bolus;  // U delivered at the start of the step
  std::span<const double> carbs;  // g ingested at the step
};

/// Builds the 12-dimensional state. Insulin activity weighs per-step insulin
/// amounts in U (basal * period / 60 + bolus) by (1 - k/80) for lags
/// k = 0..79; carb activity does the same for carbs. Missing history comes
/// from `padding`; without padding, short history throws.
FeatureVector featurize(const RawHistoryView& history, double control_period_minutes,
                        const std::optional<HistoryPadding>& padding);

}  // namespace glucolab
