#include "glucolab/control/pid_controller.hpp"

#include <algorithm>

namespace glucolab {

PidController::PidController(PidParams params, std::optional<OuParams> noise, std::uint64_t seed)
    : params_(params), noise_(noise), rng_(seed) {
  params_.validate();
  if (noise_) noise_->validate();
  reset();
}

void PidController::reset() {
  state_ = {};
  noise_value_ = noise_ ? noise_->mu : 0.0;
}

double PidController::act(const GlucoseEnv& env) {
  const auto out = pid_step(params_, state_, env.latest_cgm());
  state_ = out.state;
  double basal = out.basal_rate;
  if (noise_) {
    basal += noise_value_;
    noise_value_ = ou_step(*noise_, noise_value_, 1.0, rng_);
  }
  return std::clamp(normalize_action(basal, env.patient().max_basal), -1.0, 1.0);
}

}  // namespace glucolab
