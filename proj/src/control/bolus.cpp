#include "glucolab/control/bolus.hpp"

namespace glucolab {

double bolus_dose(const PatientParams& params, double announced_carbs, double glucose,
                  double recent_carbs, const PumpConfig& pump) {
  double dose = announced_carbs / params.carb_ratio;
  if (recent_carbs == 0.0) dose += (glucose - kGlucoseTarget) / params.correction_factor;
  return quantize_bolus(pump, dose);
}

}  // namespace glucolab
