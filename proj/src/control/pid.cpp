#include "glucolab/control/pid.hpp"

#include <algorithm>
#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab {

void PidParams::validate() const {
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) {
    throw ConfigError("pid: gains must be finite");
  }
  if (!(g_target > 0.0)) throw ConfigError("pid: g_target must be > 0");
  if (!(integral_limit >= 0.0)) throw ConfigError("pid: integral_limit must be >= 0");
}

PidOutput pid_step(const PidParams& params, const PidState& state, double glucose) {
  PidOutput out;
  out.state.integral_error = std::clamp(state.integral_error + (glucose - params.g_target),
                                        -params.integral_limit, params.integral_limit);
  const double previous = state.has_previous ? state.previous_glucose : glucose;
  out.basal_rate = params.kp * (params.g_target - glucose) +
                   params.ki * out.state.integral_error + params.kd * (glucose - previous);
  out.state.previous_glucose = glucose;
  out.state.has_previous = true;
  return out;
}

}  // namespace glucolab
