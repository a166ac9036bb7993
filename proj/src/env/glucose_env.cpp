#include "glucolab/env/glucose_env.hpp"

#include <algorithm>
#include <cmath>

#include "glucolab/control/bolus.hpp"
#include "glucolab/env/risk.hpp"
#include "glucolab/util/errors.hpp"

namespace glucolab {

namespace {
enum Stream : std::uint64_t { kMealStream = 1, kSensorStream = 2, kCarbStream = 3 };
}

std::size_t EpisodeConfig::horizon_steps() const {
  return static_cast<std::size_t>(std::llround(length_days * kMinutesPerDay / control_period));
}

void EpisodeConfig::validate() const {
  if (!(length_days > 0.0)) throw ConfigError("episode: length_days must be > 0");
  if (!(control_period > 0.0)) throw ConfigError("episode: control_period must be > 0");
  if (!(glucose_lower < glucose_upper)) throw ConfigError("episode: glucose bounds must be ordered");
}

void EnvConfig::validate() const {
  episode.validate();
  sensor.validate();
  pump.validate();
  meals.validate();
  if (!(meal_time_sd >= 0.0)) throw ConfigError("env: meal_time_sd must be >= 0");
  if (!(carb_noise_sd >= 0.0)) throw ConfigError("env: carb_noise_sd must be >= 0");
  if (!(bolus_scale >= 0.0)) throw ConfigError("env: bolus_scale must be >= 0");
}

double denormalize_action(double action, double max_basal) {
  return (std::clamp(action, -1.0, 1.0) + 1.0) * 0.5 * max_basal;
}

double normalize_action(double basal_rate, double max_basal) {
  return 2.0 * basal_rate / max_basal - 1.0;
}

GlucoseEnv::GlucoseEnv(PatientParams patient, EnvConfig config, std::uint64_t seed)
    : patient_(std::move(patient)),
      config_(std::move(config)),
      meal_rng_(derive_seed(seed, kMealStream)),
      sensor_rng_(derive_seed(seed, kSensorStream)),
      carb_rng_(derive_seed(seed, kCarbStream)),
      sensor_(config_.sensor) {
  patient_.validate();
  config_.validate();
  scaled_meals_ = config_.meals.scaled_to(patient_.body_mass);
  reset();
}

void GlucoseEnv::reset() {
  state_ = equilibrium_state(patient_);
  padding_ = {state_.plasma_glucose, patient_.basal_equilibrium};
  sensor_.reset();
  meals_.clear();
  scheduled_days_ = 0;
  next_meal_ = 0;
  const std::size_t horizon = config_.episode.horizon_steps();
  for (auto* column : {&cgm_, &basal_, &bolus_, &carbs_, &announced_}) {
    column->clear();
    column->reserve(horizon);
  }
  done_ = false;
}

void GlucoseEnv::schedule_day(std::size_t day) {
  auto events =
      generate_meal_schedule(scaled_meals_, config_.meal_time_sd, config_.include_snacks, meal_rng_);
  for (auto& e : events) {
    e.time += static_cast<double>(day) * kMinutesPerDay;
    double multiplier = 1.0;
    if (config_.carb_noise_sd > 0.0) {
      multiplier = std::max(0.0, 1.0 + config_.carb_noise_sd * standard_normal(carb_rng_));
    }
    e.announced_carbs = e.carbs * multiplier * config_.bolus_scale;
    meals_.push_back(e);
  }
}

FeatureVector GlucoseEnv::observation() const {
  return featurize({cgm_, basal_, bolus_, carbs_}, config_.episode.control_period, padding_);
}

double GlucoseEnv::latest_cgm() const { return cgm_.empty() ? padding_.cgm : cgm_.back(); }

HistoryPadding GlucoseEnv::padding() const { return padding_; }

double GlucoseEnv::recent_announced_carbs() const {
  double total = 0.0;
  const std::size_t n = announced_.size();
  const std::size_t window = std::min<std::size_t>(n, kBolusGateSteps);
  for (std::size_t k = 0; k < window; ++k) total += announced_[n - 1 - k];
  return total;
}

StepRecord GlucoseEnv::step_basal(double basal_rate) {
  const double quantized = quantize_basal(config_.pump, basal_rate, patient_.max_basal);
  return step(normalize_action(quantized, patient_.max_basal));
}

StepRecord GlucoseEnv::step(double normalized_action) {
  if (done_) throw Error("env: step called after episode end");
  if (!std::isfinite(normalized_action)) throw NumericalError("env: non-finite action");
  const double period = config_.episode.control_period;
  const std::size_t t = cgm_.size();
  const double start = static_cast<double>(t) * period;
  const double end = start + period;

  while (static_cast<double>(scheduled_days_) * kMinutesPerDay < end) {
    schedule_day(scheduled_days_++);
  }
  double true_carbs = 0.0;
  double announced = 0.0;
  while (next_meal_ < meals_.size() && meals_[next_meal_].time < end) {
    true_carbs += meals_[next_meal_].carbs;
    announced += meals_[next_meal_].announced_carbs;
    ++next_meal_;
  }

  StepRecord rec;
  rec.step_index = t;
  rec.basal = quantize_basal(config_.pump, denormalize_action(normalized_action, patient_.max_basal),
                             patient_.max_basal);
  rec.true_carbs = true_carbs;
  rec.announced_carbs = announced;
  if (announced > 0.0) {
    rec.bolus = bolus_dose(patient_, announced, latest_cgm(), recent_announced_carbs(), config_.pump);
  }

  state_ = step_physiology(state_, patient_, rec.basal, rec.bolus, true_carbs, period,
                           config_.integrator);
  rec.true_glucose = state_.plasma_glucose;
  rec.cgm = sensor_.read(state_, sensor_rng_);

  cgm_.push_back(rec.cgm);
  basal_.push_back(rec.basal);
  bolus_.push_back(rec.bolus);
  carbs_.push_back(true_carbs);
  announced_.push_back(announced);

  rec.failed = rec.true_glucose < config_.episode.glucose_lower ||
               rec.true_glucose > config_.episode.glucose_upper;
  rec.reward = -magni_risk(rec.true_glucose);
  if (rec.failed) rec.reward += config_.episode.termination_penalty;
  rec.done = rec.failed || cgm_.size() >= config_.episode.horizon_steps();
  done_ = rec.done;
  return rec;
}

}  // namespace glucolab
