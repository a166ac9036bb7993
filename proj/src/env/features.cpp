#include "glucolab/env/features.hpp"

#include "glucolab/util/errors.hpp"

namespace glucolab {

FeatureVector featurize(const RawHistoryView& h, double control_period_minutes,
                        const std::optional<HistoryPadding>& padding) {
  const std::size_t n = h.cgm.size();
  if (h.basal.size() != n || h.bolus.size() != n || h.carbs.size() != n) {
    throw Error("featurize: history columns differ in length");
  }
  const std::size_t needed_cgm = (kGlucoseHistoryLength - 1) * kGlucoseHistoryStride + 1;
  if (!padding && (n < needed_cgm || n < kActivityWindow)) {
    throw Error("featurize: insufficient history and padding disabled");
  }
  const double hours_per_step = control_period_minutes / 60.0;

  FeatureVector f{};
  for (std::size_t k = 0; k < kGlucoseHistoryLength; ++k) {
    const std::size_t lag = k * kGlucoseHistoryStride;
    f[k] = lag < n ? h.cgm[n - 1 - lag] : padding->cgm;
  }
  double insulin = 0.0;
  double carbs = 0.0;
  for (std::size_t lag = 0; lag < kActivityWindow; ++lag) {
    const double w = 1.0 - static_cast<double>(lag) / static_cast<double>(kActivityWindow);
    if (lag < n) {
      const std::size_t i = n - 1 - lag;
      insulin += w * (h.basal[i] * hours_per_step + h.bolus[i]);
      carbs += w * h.carbs[i];
    } else {
      insulin += w * padding->basal * hours_per_step;
    }
  }
  f[kInsulinActivityIndex] = insulin;
  f[kCarbActivityIndex] = carbs;
  return f;
}

}  // namespace glucolab
