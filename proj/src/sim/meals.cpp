#include "glucolab/sim/meals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glucolab/util/errors.hpp"
#include "glucolab/util/keyvalue.hpp"

namespace glucolab {

namespace {

constexpr long long kMealFormatVersion = 1;
constexpr int kMaxRejections = 1000;

double truncated_normal(double mean, double sd, double lo, double hi, Rng& rng) {
  if (sd == 0.0) return std::clamp(mean, lo, hi);
  for (int i = 0; i < kMaxRejections; ++i) {
    const double x = mean + sd * standard_normal(rng);
    if (x >= lo && x < hi) return x;
  }
  return std::clamp(mean, lo, hi);
}

}  // namespace

MealProfile MealProfile::scaled_to(double body_mass) const {
  MealProfile out = *this;
  const double factor = body_mass / reference_body_mass;
  for (auto& slot : out.slots) {
    slot.mean_carbs *= factor;
    slot.carb_sd *= factor;
  }
  out.reference_body_mass = body_mass;
  return out;
}

void MealProfile::validate() const {
  if (slots.empty()) throw ConfigError("meal profile: no slots");
  if (!(reference_body_mass > 0.0)) throw ConfigError("meal profile: reference mass must be > 0");
  for (const auto& s : slots) {
    if (!(s.mean_time >= 0.0 && s.mean_time < kMinutesPerDay)) {
      throw ConfigError("meal profile: slot '" + s.name + "' time outside the day");
    }
    if (!(s.mean_carbs >= 0.0) || !(s.carb_sd >= 0.0)) {
      throw ConfigError("meal profile: slot '" + s.name + "' has negative carbs");
    }
  }
}

MealProfile parse_meal_profile(const std::string& text) {
  const auto doc = KeyValueDoc::parse(text, "meal profile");
  if (doc.get_int("format_version") != kMealFormatVersion) {
    throw FormatError("meal profile: unsupported format_version");
  }
  MealProfile profile;
  profile.reference_body_mass = doc.get_double("reference_body_mass_kg");
  profile.default_time_sd = doc.get_double("meal_time_sd_minutes");
  for (const auto& name : doc.sections()) {
    const auto s = doc.section(name);
    MealSlot slot;
    slot.name = name;
    slot.mean_time = s.get_double("mean_time_minutes");
    slot.mean_carbs = s.get_double("mean_carbs_g");
    slot.carb_sd = s.get_double("carb_sd_g");
    slot.is_snack = s.get_bool("is_snack", false);
    profile.slots.push_back(slot);
  }
  profile.validate();
  return profile;
}

MealProfile load_meal_profile(const std::filesystem::path& path) {
  return parse_meal_profile(KeyValueDoc::load(path).to_string());
}

MealProfile default_meal_profile() {
  MealProfile p;
  p.reference_body_mass = 70.0;
  p.default_time_sd = 30.0;
  p.slots = {
      {"breakfast", 7.0 * 60, 50.0, 10.0, false},  {"morning_snack", 10.0 * 60, 15.0, 5.0, true},
      {"lunch", 12.5 * 60, 50.0, 10.0, false},     {"afternoon_snack", 15.5 * 60, 15.0, 5.0, true},
      {"dinner", 18.5 * 60, 50.0, 10.0, false},    {"evening_snack", 21.5 * 60, 15.0, 5.0, true},
  };
  return p;
}

std::vector<MealEvent> generate_meal_schedule(const MealProfile& profile, double time_sd,
                                              bool include_snacks, Rng& rng) {
  if (!(time_sd >= 0.0)) throw ConfigError("meal schedule: time_sd must be >= 0");
  std::vector<MealEvent> events;
  for (const auto& slot : profile.slots) {
    if (slot.is_snack && !include_snacks) continue;
    MealEvent e;
    e.is_snack = slot.is_snack;
    e.time = truncated_normal(slot.mean_time, time_sd, 0.0, kMinutesPerDay, rng);
    e.carbs = slot.carb_sd == 0.0
                  ? slot.mean_carbs
                  : truncated_normal(slot.mean_carbs, slot.carb_sd, 0.0,
                                     std::numeric_limits<double>::infinity(), rng);
    e.announced_carbs = e.carbs;
    events.push_back(e);
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const MealEvent& a, const MealEvent& b) { return a.time < b.time; });
  return events;
}

}  // namespace glucolab
