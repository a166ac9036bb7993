#pragma once

namespace glucolab {

inline constexpr double kGlucoseTarget = 144.0;  // mg/dl

/// Gains of the literal PID law
///   i_t = kp (g_target - g_t) + ki * sum_{t'<=t} (g_t' - g_target) + kd (g_t - g_{t-1}).
/// Signs are unrestricted.
struct PidParams {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double g_target = kGlucoseTarget;
  double integral_limit = 1.0e5;  // mg/dl * steps, symmetric wind-up clamp

  void validate() const;
  bool operator==(const PidParams&) const = default;
};

struct PidState {
  double integral_error = 0.0;
  double previous_glucose = 0.0;
  bool has_previous = false;

  bool operator==(const PidState&) const = default;
};

struct PidOutput {
  double basal_rate = 0.0;  // U/h, raw (before pump clamping)
  PidState state;
};

/// Pure: the returned state replaces the caller's. On the first call the
/// derivative term is zero.
PidOutput pid_step(const PidParams& params, const PidState& state, double glucose);

}  // namespace glucolab
