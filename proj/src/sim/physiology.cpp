#include "glucolab/sim/physiology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glucolab/util/errors.hpp"

namespace glucolab {

namespace {

PatientState axpy(const PatientState& x, double h, const PatientState& dx) {
  PatientState out;
  out.plasma_glucose = x.plasma_glucose + h * dx.plasma_glucose;
  out.remote_insulin_action = x.remote_insulin_action + h * dx.remote_insulin_action;
  out.plasma_insulin = x.plasma_insulin + h * dx.plasma_insulin;
  out.sc_insulin_1 = x.sc_insulin_1 + h * dx.sc_insulin_1;
  out.sc_insulin_2 = x.sc_insulin_2 + h * dx.sc_insulin_2;
  out.gut_1 = x.gut_1 + h * dx.gut_1;
  out.gut_2 = x.gut_2 + h * dx.gut_2;
  out.clock = x.clock;
  return out;
}

bool finite(const PatientState& s) {
  return std::isfinite(s.plasma_glucose) && std::isfinite(s.remote_insulin_action) &&
         std::isfinite(s.plasma_insulin) && std::isfinite(s.sc_insulin_1) &&
         std::isfinite(s.sc_insulin_2) && std::isfinite(s.gut_1) && std::isfinite(s.gut_2);
}

void clamp_nonnegative(PatientState& s) {
  s.plasma_glucose = std::max(s.plasma_glucose, kGlucoseFloor);
  s.remote_insulin_action = std::max(s.remote_insulin_action, 0.0);
  s.plasma_insulin = std::max(s.plasma_insulin, 0.0);
  s.sc_insulin_1 = std::max(s.sc_insulin_1, 0.0);
  s.sc_insulin_2 = std::max(s.sc_insulin_2, 0.0);
  s.gut_1 = std::max(s.gut_1, 0.0);
  s.gut_2 = std::max(s.gut_2, 0.0);
}

}  // namespace

PatientState physiology_derivative(const PatientState& s, const PatientParams& p,
                                   double basal_rate) {
  const double insulin_volume = kInsulinVolumeLitresPerKg * p.body_mass;
  const double glucose_volume = kGlucoseVolumeDecilitresPerKg * p.body_mass;
  const double sc_outflow = p.insulin_absorption_rate * s.sc_insulin_2;  // U/min
  const double gut_outflow = p.gut_absorption_rate * s.gut_2;            // g/min
  const double appearance =
      p.carb_bioavailability * gut_outflow * 1000.0 / glucose_volume;  // mg/dl/min

  PatientState d;
  d.sc_insulin_1 = basal_rate / 60.0 - p.insulin_absorption_rate * s.sc_insulin_1;
  d.sc_insulin_2 = p.insulin_absorption_rate * s.sc_insulin_1 - sc_outflow;
  d.plasma_insulin = sc_outflow * 1000.0 / insulin_volume - p.insulin_clearance_rate * s.plasma_insulin;
  d.remote_insulin_action =
      p.insulin_action_rate * (p.insulin_sensitivity * s.plasma_insulin - s.remote_insulin_action);
  d.gut_1 = -p.gut_absorption_rate * s.gut_1;
  d.gut_2 = p.gut_absorption_rate * s.gut_1 - gut_outflow;
  d.plasma_glucose = -(p.glucose_effectiveness + s.remote_insulin_action) * s.plasma_glucose +
                     p.endogenous_glucose_production + appearance;
  d.clock = 1.0;
  return d;
}

PatientState step_physiology(const PatientState& state, const PatientParams& params,
                             double basal_rate, double bolus, double carbs, double dt,
                             const IntegratorConfig& integrator) {
  if (!(dt > 0.0)) throw Error("step_physiology: dt must be > 0");
  if (!(basal_rate >= 0.0) || !(bolus >= 0.0) || !(carbs >= 0.0)) {
    throw Error("step_physiology: inputs must be non-negative");
  }
  PatientState s = state;
  s.sc_insulin_1 += bolus;
  s.gut_1 += carbs;

  const int substeps = std::max(1, static_cast<int>(std::ceil(dt / integrator.substep_minutes - 1e-9)));
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    const auto k1 = physiology_derivative(s, params, basal_rate);
    const auto k2 = physiology_derivative(axpy(s, 0.5 * h, k1), params, basal_rate);
    const auto k3 = physiology_derivative(axpy(s, 0.5 * h, k2), params, basal_rate);
    const auto k4 = physiology_derivative(axpy(s, h, k3), params, basal_rate);
    PatientState next = s;
    const auto blend = [h](double x, double a, double b, double c, double d) {
      return x + h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
    };
    next.plasma_glucose = blend(s.plasma_glucose, k1.plasma_glucose, k2.plasma_glucose,
                                k3.plasma_glucose, k4.plasma_glucose);
    next.remote_insulin_action =
        blend(s.remote_insulin_action, k1.remote_insulin_action, k2.remote_insulin_action,
              k3.remote_insulin_action, k4.remote_insulin_action);
    next.plasma_insulin = blend(s.plasma_insulin, k1.plasma_insulin, k2.plasma_insulin,
                                k3.plasma_insulin, k4.plasma_insulin);
    next.sc_insulin_1 =
        blend(s.sc_insulin_1, k1.sc_insulin_1, k2.sc_insulin_1, k3.sc_insulin_1, k4.sc_insulin_1);
    next.sc_insulin_2 =
        blend(s.sc_insulin_2, k1.sc_insulin_2, k2.sc_insulin_2, k3.sc_insulin_2, k4.sc_insulin_2);
    next.gut_1 = blend(s.gut_1, k1.gut_1, k2.gut_1, k3.gut_1, k4.gut_1);
    next.gut_2 = blend(s.gut_2, k1.gut_2, k2.gut_2, k3.gut_2, k4.gut_2);
    if (!finite(next)) {
      throw SimulationDivergedError("simulation diverged at t=" + std::to_string(s.clock) + " min");
    }
    clamp_nonnegative(next);
    next.clock = s.clock + h;
    s = next;
  }
  s.clock = state.clock + dt;
  return s;
}

}  // namespace glucolab
