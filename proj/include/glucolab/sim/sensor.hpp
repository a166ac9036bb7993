#pragma once

#include "glucolab/sim/patient.hpp"
#include "glucolab/util/random.hpp"

namespace glucolab {

struct SensorConfig {
  double sample_period = 3.0;         // minutes
  double noise_sd = 5.0;              // mg/dl
  double noise_autocorrelation = 0.7;
  double output_min = 39.0;           // mg/dl
  double output_max = 600.0;          // mg/dl

  void validate() const;
};

/// CGM with AR(1) Gaussian error:
///   e_t = rho * e_{t-1} + sqrt(1 - rho^2) * sigma * N(0, 1)
/// The first reading draws e_0 from the stationary N(0, sigma^2).
class CgmSensor {
 public:
  explicit CgmSensor(SensorConfig config = {});

  double read(const PatientState& state, Rng& rng);
  void reset() { started_ = false; error_ = 0.0; }

  const SensorConfig& config() const { return config_; }

 private:
  SensorConfig config_;
  double error_ = 0.0;
  bool started_ = false;
};

}  // namespace glucolab
