#include "glucolab/sim/sensor.hpp"

#include <algorithm>
#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab {

void SensorConfig::validate() const {
  if (!(sample_period > 0.0)) throw ConfigError("sensor: sample_period must be > 0");
  if (!(noise_sd >= 0.0)) throw ConfigError("sensor: noise_sd must be >= 0");
  if (!(noise_autocorrelation >= 0.0 && noise_autocorrelation < 1.0)) {
    throw ConfigError("sensor: autocorrelation must be in [0, 1)");
  }
  if (!(output_min < output_max)) throw ConfigError("sensor: output range must be ordered");
}

CgmSensor::CgmSensor(SensorConfig config) : config_(config) { config_.validate(); }

double CgmSensor::read(const PatientState& state, Rng& rng) {
  if (config_.noise_sd > 0.0) {
    const double z = standard_normal(rng);
    if (!started_) {
      error_ = config_.noise_sd * z;
    } else {
      const double rho = config_.noise_autocorrelation;
      error_ = rho * error_ + std::sqrt(1.0 - rho * rho) * config_.noise_sd * z;
    }
  }
  started_ = true;
  return std::clamp(state.plasma_glucose + error_, config_.output_min, config_.output_max);
}

}  // namespace glucolab
