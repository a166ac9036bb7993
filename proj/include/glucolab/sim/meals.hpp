#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glucolab/util/random.hpp"

namespace glucolab {

inline constexpr double kMinutesPerDay = 1440.0;

struct MealEvent {
  double time = 0.0;  // minutes of day
  double carbs = 0.0;  // g
  bool is_snack = false;
  double announced_carbs = 0.0;  // g, what the bolus calculator is told
};

/// One recurring daily eating event.
struct MealSlot {
  std::string name;
  double mean_time = 0.0;   // minutes of day
  double mean_carbs = 0.0;  // g
  double carb_sd = 0.0;     // g
  bool is_snack = false;
};

struct MealProfile {
  std::vector<MealSlot> slots;
  double reference_body_mass = 70.0;  // kg the amounts are stated for
  double default_time_sd = 30.0;      // minutes

  /// Copy with carb means and sds scaled by body_mass / reference_body_mass.
  MealProfile scaled_to(double body_mass) const;
  void validate() const;
};

MealProfile load_meal_profile(const std::filesystem::path& path);
MealProfile parse_meal_profile(const std::string& text);
MealProfile default_meal_profile();

/// Samples one day of events. Times ~ N(mean, time_sd^2) truncated to
/// [0, 1440); amounts ~ N(mean, sd^2) truncated at 0. Sorted by time.
/// announced_carbs is set equal to carbs.
std::vector<MealEvent> generate_meal_schedule(const MealProfile& profile, double time_sd,
                                              bool include_snacks, Rng& rng);

}  // namespace glucolab
