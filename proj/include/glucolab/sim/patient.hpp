#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace glucolab {

enum class AgeGroup { adult, adolescent, child };

std::string_view to_string(AgeGroup group);
AgeGroup parse_age_group(std::string_view text);

/// Plasma insulin distribution volume per kg body mass.
inline constexpr double kInsulinVolumeLitresPerKg = 0.12;
/// Glucose distribution volume per kg body mass.
inline constexpr double kGlucoseVolumeDecilitresPerKg = 1.6;

/// Parameters of one virtual patient.
///
/// The physiology is an extended Bergman minimal model. Units:
///   insulin_sensitivity            1/min per mU/l of plasma insulin
///   insulin_action_rate            1/min (remote compartment turnover)
///   gut/insulin absorption, clearance, glucose_effectiveness   1/min
///   endogenous_glucose_production  mg/dl/min
///   basal_equilibrium, max_basal   U/h
///   carb_ratio                     g/U
///   correction_factor              (mg/dl)/U
struct PatientParams {
  std::string id;
  AgeGroup age_group = AgeGroup::adult;
  double body_mass = 70.0;
  double insulin_sensitivity = 5.0e-4;
  double insulin_action_rate = 0.025;
  double carb_bioavailability = 0.9;
  double gut_absorption_rate = 0.025;
  double insulin_absorption_rate = 0.018;
  double insulin_clearance_rate = 0.14;
  double endogenous_glucose_production = 1.3;
  double glucose_effectiveness = 0.003;
  double basal_equilibrium = 1.0;
  double max_basal = 5.0;
  double carb_ratio = 10.0;
  double correction_factor = 60.0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

struct PatientState {
  double plasma_glucose = 0.0;         // mg/dl
  double remote_insulin_action = 0.0;  // 1/min
  double plasma_insulin = 0.0;         // mU/l
  double sc_insulin_1 = 0.0;           // U
  double sc_insulin_2 = 0.0;           // U
  double gut_1 = 0.0;                  // g
  double gut_2 = 0.0;                  // g
  double clock = 0.0;                  // minutes since episode start

  bool operator==(const PatientState&) const = default;
};

/// Steady state under a constant basal rate with an empty gut.
PatientState steady_state(const PatientParams& params, double basal_rate);

/// Steady state at `basal_equilibrium`.
inline PatientState equilibrium_state(const PatientParams& params) {
  return steady_state(params, params.basal_equilibrium);
}

std::vector<PatientParams> load_cohort(const std::filesystem::path& path);
std::vector<PatientParams> parse_cohort(const std::string& text);
std::string cohort_to_string(const std::vector<PatientParams>& cohort);
const PatientParams& find_patient(const std::vector<PatientParams>& cohort, std::string_view id);

/// Path of the cohort file shipped in data/.
std::filesystem::path default_cohort_path();
std::filesystem::path default_meal_profile_path();

}  // namespace glucolab
