#include "glucolab/sim/patient.hpp"

#include <cmath>

#include "glucolab/util/errors.hpp"
#include "glucolab/util/keyvalue.hpp"

namespace glucolab {

namespace {

constexpr long long kCohortFormatVersion = 1;

void require(bool condition, const PatientParams& p, const char* what) {
  if (!condition) throw ConfigError("patient '" + p.id + "': " + what);
}

}  // namespace

std::string_view to_string(AgeGroup group) {
  switch (group) {
    case AgeGroup::adult: return "adult";
    case AgeGroup::adolescent: return "adolescent";
    case AgeGroup::child: return "child";
  }
  return "adult";
}

AgeGroup parse_age_group(std::string_view text) {
  if (text == "adult") return AgeGroup::adult;
  if (text == "adolescent") return AgeGroup::adolescent;
  if (text == "child") return AgeGroup::child;
  throw ConfigError("unknown age group '" + std::string(text) + "'");
}

void PatientParams::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(!id.empty(), *this, "empty id");
  require(positive(body_mass), *this, "body_mass must be > 0");
  require(positive(insulin_sensitivity), *this, "insulin_sensitivity must be > 0");
  require(positive(insulin_action_rate), *this, "insulin_action_rate must be > 0");
  require(positive(gut_absorption_rate), *this, "gut_absorption_rate must be > 0");
  require(positive(insulin_absorption_rate), *this, "insulin_absorption_rate must be > 0");
  require(positive(insulin_clearance_rate), *this, "insulin_clearance_rate must be > 0");
  require(positive(endogenous_glucose_production), *this, "endogenous_glucose_production must be > 0");
  require(positive(glucose_effectiveness), *this, "glucose_effectiveness must be > 0");
  require(carb_bioavailability > 0.0 && carb_bioavailability <= 1.0, *this,
          "carb_bioavailability must be in (0, 1]");
  require(positive(basal_equilibrium), *this, "basal_equilibrium must be > 0");
  require(std::isfinite(max_basal) && max_basal > basal_equilibrium, *this,
          "max_basal must exceed basal_equilibrium");
  require(positive(carb_ratio), *this, "CR must be > 0");
  require(positive(correction_factor), *this, "CF must be > 0");
}

PatientState steady_state(const PatientParams& p, double basal_rate) {
  const double insulin_per_minute = basal_rate / 60.0;
  PatientState s;
  s.sc_insulin_1 = insulin_per_minute / p.insulin_absorption_rate;
  s.sc_insulin_2 = s.sc_insulin_1;
  s.plasma_insulin = insulin_per_minute * 1000.0 /
                     (kInsulinVolumeLitresPerKg * p.body_mass * p.insulin_clearance_rate);
  s.remote_insulin_action = p.insulin_sensitivity * s.plasma_insulin;
  s.plasma_glucose =
      p.endogenous_glucose_production / (p.glucose_effectiveness + s.remote_insulin_action);
  return s;
}

std::vector<PatientParams> parse_cohort(const std::string& text) {
  const auto doc = KeyValueDoc::parse(text, "cohort");
  const auto version = doc.get_int("format_version");
  if (version != kCohortFormatVersion) {
    throw FormatError("cohort: unsupported format_version " + std::to_string(version));
  }
  std::vector<PatientParams> cohort;
  for (const auto& name : doc.sections()) {
    const auto s = doc.section(name);
    PatientParams p;
    p.id = name;
    p.age_group = parse_age_group(s.get_string("age_group"));
    p.body_mass = s.get_double("body_mass_kg");
    p.insulin_sensitivity = s.get_double("insulin_sensitivity_per_min_per_mu_l");
    p.insulin_action_rate = s.get_double("insulin_action_rate_per_min");
    p.carb_bioavailability = s.get_double("carb_bioavailability");
    p.gut_absorption_rate = s.get_double("gut_absorption_rate_per_min");
    p.insulin_absorption_rate = s.get_double("insulin_absorption_rate_per_min");
    p.insulin_clearance_rate = s.get_double("insulin_clearance_rate_per_min");
    p.endogenous_glucose_production = s.get_double("endogenous_glucose_production_mg_dl_min");
    p.glucose_effectiveness = s.get_double("glucose_effectiveness_per_min");
    p.basal_equilibrium = s.get_double("basal_equilibrium_u_h");
    p.max_basal = s.get_double("max_basal_u_h");
    p.carb_ratio = s.get_double("carb_ratio_g_u");
    p.correction_factor = s.get_double("correction_factor_mg_dl_u");
    p.validate();
    cohort.push_back(std::move(p));
  }
  if (cohort.empty()) throw ConfigError("cohort: no patients");
  return cohort;
}

std::vector<PatientParams> load_cohort(const std::filesystem::path& path) {
  const auto doc = KeyValueDoc::load(path);
  return parse_cohort(doc.to_string());
}

std::string cohort_to_string(const std::vector<PatientParams>& cohort) {
  KeyValueDoc doc;
  doc.set("format_version", kCohortFormatVersion);
  for (const auto& p : cohort) {
    const auto k = [&](const char* key) { return p.id + "." + key; };
    doc.set(k("age_group"), std::string(to_string(p.age_group)));
    doc.set(k("body_mass_kg"), p.body_mass);
    doc.set(k("insulin_sensitivity_per_min_per_mu_l"), p.insulin_sensitivity);
    doc.set(k("insulin_action_rate_per_min"), p.insulin_action_rate);
    doc.set(k("carb_bioavailability"), p.carb_bioavailability);
    doc.set(k("gut_absorption_rate_per_min"), p.gut_absorption_rate);
    doc.set(k("insulin_absorption_rate_per_min"), p.insulin_absorption_rate);
    doc.set(k("insulin_clearance_rate_per_min"), p.insulin_clearance_rate);
    doc.set(k("endogenous_glucose_production_mg_dl_min"), p.endogenous_glucose_production);
    doc.set(k("glucose_effectiveness_per_min"), p.glucose_effectiveness);
    doc.set(k("basal_equilibrium_u_h"), p.basal_equilibrium);
    doc.set(k("max_basal_u_h"), p.max_basal);
    doc.set(k("carb_ratio_g_u"), p.carb_ratio);
    doc.set(k("correction_factor_mg_dl_u"), p.correction_factor);
  }
  return doc.to_string();
}

const PatientParams& find_patient(const std::vector<PatientParams>& cohort, std::string_view id) {
  for (const auto& p : cohort) {
    if (p.id == id) return p;
  }
  throw ConfigError("unknown patient id '" + std::string(id) + "'");
}

std::filesystem::path default_cohort_path() {
  return std::filesystem::path(GLUCOLAB_SOURCE_DIR) / "data" / "cohort.ini";
}

std::filesystem::path default_meal_profile_path() {
  return std::filesystem::path(GLUCOLAB_SOURCE_DIR) / "data" / "meals.ini";
}

}  // namespace glucolab
