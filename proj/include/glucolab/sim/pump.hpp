#pragma once

namespace glucolab {

struct PumpConfig {
  double basal_resolution = 0.05;  // U/h
  double min_basal = 0.0;          // U/h
  double bolus_resolution = 0.05;  // U

  void validate() const;
};

/// Clamps to [min_basal, max_basal] then floors to the basal grid.
double quantize_basal(const PumpConfig& pump, double basal_rate, double max_basal);

/// Clamps at zero then floors to the bolus grid.
double quantize_bolus(const PumpConfig& pump, double bolus);

}  // namespace glucolab
