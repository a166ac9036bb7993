#pragma once

#include <cstdint>
#include <vector>

#include "glucolab/env/features.hpp"
#include "glucolab/sim/meals.hpp"
#include "glucolab/sim/patient.hpp"
#include "glucolab/sim/physiology.hpp"
#include "glucolab/sim/pump.hpp"
#include "glucolab/sim/sensor.hpp"
#include "glucolab/util/random.hpp"

namespace glucolab {

struct EpisodeConfig {
  double length_days = 10.0;
  double control_period = 3.0;  // minutes
  double glucose_lower = 10.0;  // mg/dl, true glucose
  double glucose_upper = 1000.0;
  double termination_penalty = -1.0e5;

  std::size_t horizon_steps() const;
  void validate() const;
};

struct EnvConfig {
  EpisodeConfig episode;
  SensorConfig sensor;
  PumpConfig pump;
  MealProfile meals = default_meal_profile();  // stated for meals.reference_body_mass
  double meal_time_sd = 30.0;                  // minutes
  bool include_snacks = true;
  double carb_noise_sd = 0.0;  // relative sd of the announced-carb multiplier
  double bolus_scale = 1.0;    // announced = true * multiplier * bolus_scale
  IntegratorConfig integrator;

  void validate() const;
};

/// One control step as seen by the logger.
struct StepRecord {
  std::size_t step_index = 0;
  double true_glucose = 0.0;  // mg/dl at the end of the step
  double cgm = 0.0;           // mg/dl at the end of the step
  double basal = 0.0;         // U/h delivered
  double bolus = 0.0;         // U
  double true_carbs = 0.0;    // g
  double announced_carbs = 0.0;
  double reward = 0.0;
  bool done = false;
  bool failed = false;  // true glucose left the allowed band
};

/// Basal action normalization: [-1, 1] <-> [0, max_basal] U/h.
double denormalize_action(double action, double max_basal);
double normalize_action(double basal_rate, double max_basal);

/// Episodic glucose-control environment. Each control step: meals falling in
/// the step are eaten, the bolus calculator doses announced carbs from the
/// latest CGM reading, the chosen basal is held for one control period, then
/// CGM is read and the reward computed on true glucose.
class GlucoseEnv {
 public:
  GlucoseEnv(PatientParams patient, EnvConfig config, std::uint64_t seed);

  /// Starts a new episode from the patient's equilibrium. Random streams
  /// continue from the previous episode.
  void reset();

  /// Features of the current decision point.
  FeatureVector observation() const;
  double latest_cgm() const;
  HistoryPadding padding() const;

  StepRecord step(double normalized_action);
  /// Convenience for controllers working in U/h: clamps and quantizes.
  StepRecord step_basal(double basal_rate);

  bool done() const { return done_; }
  std::size_t steps_taken() const { return cgm_.size(); }
  const PatientState& patient_state() const { return state_; }
  const PatientParams& patient() const { return patient_; }
  const EnvConfig& config() const { return config_; }

 private:
  void schedule_day(std::size_t day);
  double recent_announced_carbs() const;

  PatientParams patient_;
  EnvConfig config_;
  MealProfile scaled_meals_;
  Rng meal_rng_;
  Rng sensor_rng_;
  Rng carb_rng_;
  CgmSensor sensor_;
  PatientState state_;
  HistoryPadding padding_;
  std::vector<MealEvent> meals_;  // absolute minutes since episode start
  std::size_t scheduled_days_ = 0;
  std::size_t next_meal_ = 0;
  std::vector<double> cgm_, basal_, bolus_, carbs_, announced_;
  bool done_ = false;
};

}  // namespace glucolab
