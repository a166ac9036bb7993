#pragma once

#include "glucolab/control/pid.hpp"
#include "glucolab/sim/patient.hpp"
#include "glucolab/sim/pump.hpp"

namespace glucolab {

/// Number of preceding control steps inspected by the correction gate.
inline constexpr int kBolusGateSteps = 60;

/// Mealtime bolus: announced/CR, plus (g - 144)/CF when no carbs were
/// announced in the preceding 60 control steps (the current step is not part
/// of the window). Negative totals clamp to zero; the result is quantized.
double bolus_dose(const PatientParams& params, double announced_carbs, double glucose,
                  double recent_carbs, const PumpConfig& pump = {});

}  // namespace glucolab
