#pragma once

#include "glucolab/sim/patient.hpp"

namespace glucolab {

inline constexpr double kGlucoseFloor = 1.0;  // mg/dl

struct IntegratorConfig {
  double substep_minutes = 1.0;
};

/// Time derivative of the compartment state under a constant basal rate (U/h).
PatientState physiology_derivative(const PatientState& state, const PatientParams& params,
                                   double basal_rate);

/// Advances the patient by `dt` minutes. The bolus (U) and carbs (g) enter
/// the first subcutaneous and gut compartments at the start of the interval;
/// the basal rate (U/h) is held constant. Fixed-step RK4.
///
/// Throws SimulationDivergedError if the state becomes non-finite.
PatientState step_physiology(const PatientState& state, const PatientParams& params,
                             double basal_rate, double bolus, double carbs, double dt,
                             const IntegratorConfig& integrator = {});

}  // namespace glucolab
