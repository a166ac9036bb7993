#include "glucolab/sim/pump.hpp"

#include <algorithm>
#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab {

namespace {

// Grid values are produced as k * resolution so that a value already on the
// grid survives a floating-point round trip; the slack absorbs that error.
double floor_to_grid(double value, double resolution) {
  const double k = std::floor(value / resolution + 1e-9);
  return k * resolution;
}

}  // namespace

void PumpConfig::validate() const {
  if (!(basal_resolution > 0.0) || !(bolus_resolution > 0.0)) {
    throw ConfigError("pump: resolutions must be > 0");
  }
  if (!(min_basal >= 0.0)) throw ConfigError("pump: min_basal must be >= 0");
}

double quantize_basal(const PumpConfig& pump, double basal_rate, double max_basal) {
  if (std::isnan(basal_rate)) return pump.min_basal;
  const double clamped = std::clamp(basal_rate, pump.min_basal, max_basal);
  return std::max(pump.min_basal, floor_to_grid(clamped, pump.basal_resolution));
}

double quantize_bolus(const PumpConfig& pump, double bolus) {
  if (!(bolus > 0.0)) return 0.0;
  return floor_to_grid(bolus, pump.bolus_resolution);
}

}  // namespace glucolab
