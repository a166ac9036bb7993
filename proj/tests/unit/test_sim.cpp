#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "glucolab/sim/meals.hpp"
#include "glucolab/sim/patient.hpp"
#include "glucolab/sim/physiology.hpp"
#include "glucolab/sim/pump.hpp"
#include "glucolab/sim/sensor.hpp"
#include "glucolab/util/errors.hpp"
#include "support/reference_ode.hpp"

using namespace glucolab;

namespace {

const std::vector<PatientParams>& cohort() {
  static const auto c = load_cohort(default_cohort_path());
  return c;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

// Glucose every minute for `minutes` after an impulse of bolus/carbs at t=0.
std::vector<double> glucose_trace(const PatientParams& p, double bolus, double carbs, int minutes,
                                  double substep = 1.0) {
  PatientState s = equilibrium_state(p);
  std::vector<double> g;
  s = step_physiology(s, p, p.basal_equilibrium, bolus, carbs, 1.0, {substep});
  g.push_back(s.plasma_glucose);
  for (int t = 1; t < minutes; ++t) {
    s = step_physiology(s, p, p.basal_equilibrium, 0.0, 0.0, 1.0, {substep});
    g.push_back(s.plasma_glucose);
  }
  return g;
}

}  // namespace

TEST_CASE("shipped cohort: nine valid patients, three per age group") {
  REQUIRE(cohort().size() == 9);
  for (auto group : {AgeGroup::adult, AgeGroup::adolescent, AgeGroup::child}) {
    CHECK(std::count_if(cohort().begin(), cohort().end(),
                        [&](const PatientParams& p) { return p.age_group == group; }) == 3);
  }
  for (const auto& p : cohort()) {
    CHECK_NOTHROW(p.validate());
    CHECK(p.max_basal > p.basal_equilibrium);
  }
  CHECK_THROWS_AS(find_patient(cohort(), "adult_99"), ConfigError);
}

TEST_CASE("cohort text round-trips") {
  const auto again = parse_cohort(cohort_to_string(cohort()));
  REQUIRE(again.size() == cohort().size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].id == cohort()[i].id);
    CHECK(again[i].insulin_sensitivity == cohort()[i].insulin_sensitivity);
    CHECK(again[i].correction_factor == cohort()[i].correction_factor);
  }
}

TEST_CASE("patient validation rejects broken invariants") {
  PatientParams p = cohort().front();
  p.carb_bioavailability = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = cohort().front();
  p.max_basal = p.basal_equilibrium * 0.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = cohort().front();
  p.gut_absorption_rate = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("equilibrium is a fixed point") {
  for (const auto& p : cohort()) {
    const PatientState s0 = equilibrium_state(p);
    for (double dt : {1.0, 3.0, 17.5, 240.0}) {
      const PatientState s = step_physiology(s0, p, p.basal_equilibrium, 0.0, 0.0, dt);
      CHECK(rel_err(s.plasma_glucose, s0.plasma_glucose) < 1e-9);
      CHECK(rel_err(s.plasma_insulin, s0.plasma_insulin) < 1e-9);
      CHECK(rel_err(s.remote_insulin_action, s0.remote_insulin_action) < 1e-9);
      CHECK(rel_err(s.sc_insulin_1, s0.sc_insulin_1) < 1e-9);
      CHECK(s.gut_1 == 0.0);
      CHECK(s.clock == doctest::Approx(s0.clock + dt));
    }
  }
}

TEST_CASE("steady state holds within 2 mg/dl over ten days without meals") {
  for (const auto& p : cohort()) {
    PatientState s = equilibrium_state(p);
    const double g0 = s.plasma_glucose;
    double worst = 0.0;
    for (int step = 0; step < 4800; ++step) {
      s = step_physiology(s, p, p.basal_equilibrium, 0.0, 0.0, 3.0);
      worst = std::max(worst, std::abs(s.plasma_glucose - g0));
    }
    CHECK(worst < 2.0);
  }
}

TEST_CASE("RK4 agrees with an adaptive reference integrator") {
  for (const auto& p : cohort()) {
    for (auto [bolus, carbs] : {std::pair{0.0, 50.0}, std::pair{10.0, 0.0}, std::pair{4.0, 60.0}}) {
      PatientState s = equilibrium_state(p);
      oracle::State y = oracle::from(s);
      y[3] += bolus;
      y[5] += carbs;
      s = step_physiology(s, p, p.basal_equilibrium, bolus, carbs, 1.0);
      y = oracle::integrate(y, p, p.basal_equilibrium, 1.0);
      for (int minute = 1; minute < 300; ++minute) {
        s = step_physiology(s, p, p.basal_equilibrium, 0.0, 0.0, 1.0);
        y = oracle::integrate(y, p, p.basal_equilibrium, 1.0);
        if (minute % 10 == 0) {
          REQUIRE(rel_err(s.plasma_glucose, y[0]) < 5e-3);
          REQUIRE(rel_err(s.plasma_insulin, y[2]) < 5e-3);
        }
      }
    }
  }
}

TEST_CASE("50 g of carbs raises adult glucose for two hours; a 10 U bolus lowers it for three") {
  for (const auto& p : cohort()) {
    if (p.age_group != AgeGroup::adult) continue;
    const double g0 = equilibrium_state(p).plasma_glucose;
    const auto meal = glucose_trace(p, 0.0, 50.0, 120);
    CHECK(meal.front() > g0);
    for (std::size_t i = 1; i < meal.size(); ++i) REQUIRE(meal[i] > meal[i - 1]);

    const auto bolus = glucose_trace(p, 10.0, 0.0, 180);
    CHECK(bolus.front() < g0);
    for (std::size_t i = 1; i < bolus.size(); ++i) REQUIRE(bolus[i] < bolus[i - 1]);
  }
}

TEST_CASE("halving the substep changes a 24 h trajectory by under 0.1%") {
  const auto& p = cohort().front();
  PatientState a = equilibrium_state(p), b = a;
  const double meals[] = {0, 420, 750, 1110};
  double worst = 0.0;
  for (int step = 0; step < 480; ++step) {
    const double t = step * 3.0;
    double carbs = 0.0;
    for (double m : meals) {
      if (m >= t && m < t + 3.0) carbs += 50.0;
    }
    const double bolus = carbs / p.carb_ratio;
    a = step_physiology(a, p, 1.1, bolus, carbs, 3.0, {1.0});
    b = step_physiology(b, p, 1.1, bolus, carbs, 3.0, {0.5});
    worst = std::max(worst, rel_err(a.plasma_glucose, b.plasma_glucose));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("compartments stay non-negative and glucose stays above the floor") {
  Rng rng(5);
  for (const auto& p : cohort()) {
    PatientState s = equilibrium_state(p);
    for (int step = 0; step < 2000; ++step) {
      const double basal = p.max_basal * uniform01(rng);
      const double bolus = uniform01(rng) < 0.02 ? 20.0 * uniform01(rng) : 0.0;
      const double carbs = uniform01(rng) < 0.02 ? 100.0 * uniform01(rng) : 0.0;
      s = step_physiology(s, p, basal, bolus, carbs, 3.0);
      REQUIRE(s.plasma_glucose >= kGlucoseFloor);
      REQUIRE(s.plasma_insulin >= 0.0);
      REQUIRE(s.remote_insulin_action >= 0.0);
      REQUIRE(s.sc_insulin_1 >= 0.0);
      REQUIRE(s.sc_insulin_2 >= 0.0);
      REQUIRE(s.gut_1 >= 0.0);
      REQUIRE(s.gut_2 >= 0.0);
    }
  }
}

TEST_CASE("massive overdose drives glucose to the floor, not below") {
  for (const auto& p : cohort()) {
    PatientState s = equilibrium_state(p);
    s = step_physiology(s, p, p.max_basal, 500.0, 0.0, 3.0);
    double nadir = s.plasma_glucose;
    for (int i = 0; i < 2000; ++i) {
      s = step_physiology(s, p, p.max_basal, 0.0, 0.0, 3.0);
      nadir = std::min(nadir, s.plasma_glucose);
    }
    CHECK(nadir >= kGlucoseFloor);
    CHECK(nadir < 10.0);
  }
}

TEST_CASE("monotone response to meal size and bolus size") {
  for (const auto& p : cohort()) {
    double last_peak = 0.0;
    for (double carbs : {10.0, 30.0, 60.0, 90.0}) {
      const auto g = glucose_trace(p, 2.0, carbs, 360);
      const double peak = *std::max_element(g.begin(), g.end());
      CHECK(peak >= last_peak);
      last_peak = peak;
    }
    double last_nadir = 1e9;
    for (double bolus : {0.0, 2.0, 5.0, 8.0}) {
      const auto g = glucose_trace(p, bolus, 60.0, 360);
      const double nadir = *std::min_element(g.begin(), g.end());
      CHECK(nadir <= last_nadir);
      last_nadir = nadir;
    }
  }
}

TEST_CASE("physiology is deterministic and rejects bad inputs") {
  const auto& p = cohort()[4];
  const PatientState s0 = equilibrium_state(p);
  CHECK(step_physiology(s0, p, 1.3, 2.0, 40.0, 3.0) == step_physiology(s0, p, 1.3, 2.0, 40.0, 3.0));
  CHECK_THROWS_AS(step_physiology(s0, p, 1.0, 0.0, 0.0, 0.0), Error);
  CHECK_THROWS_AS(step_physiology(s0, p, -1.0, 0.0, 0.0, 3.0), Error);
  CHECK_THROWS_AS(step_physiology(s0, p, 1.0, 0.0, -5.0, 3.0), Error);
  PatientState bad = s0;
  bad.plasma_glucose = std::nan("");
  CHECK_THROWS_AS(step_physiology(bad, p, 1.0, 0.0, 0.0, 3.0), SimulationDivergedError);
}

TEST_CASE("CGM: zero noise, clamping, determinism") {
  PatientState s;
  s.plasma_glucose = 123.456;
  SensorConfig quiet;
  quiet.noise_sd = 0.0;
  CgmSensor exact(quiet);
  Rng rng(1);
  CHECK(exact.read(s, rng) == 123.456);

  s.plasma_glucose = 5.0;
  CgmSensor sensor;
  CHECK(sensor.read(s, rng) == 39.0);
  s.plasma_glucose = 900.0;
  CHECK(sensor.read(s, rng) == 600.0);

  s.plasma_glucose = 150.0;
  CgmSensor a, b;
  Rng ra(9), rb(9);
  for (int i = 0; i < 100; ++i) REQUIRE(a.read(s, ra) == b.read(s, rb));
}

TEST_CASE("CGM noise: lag-1 autocorrelation and variance over 1e6 draws") {
  PatientState s;
  s.plasma_glucose = 300.0;
  SensorConfig config;
  config.output_max = 1e9;
  config.output_min = -1e9;
  CgmSensor sensor(config);
  Rng rng(2024);
  const int n = 1000000;
  std::vector<double> e(n);
  for (int i = 0; i < n; ++i) e[i] = sensor.read(s, rng) - 300.0;
  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= n;
  double c0 = 0.0, c1 = 0.0;
  for (int i = 0; i < n; ++i) {
    c0 += (e[i] - mean) * (e[i] - mean);
    if (i > 0) c1 += (e[i] - mean) * (e[i - 1] - mean);
  }
  CHECK(std::abs(c1 / c0 - 0.7) < 0.02);
  CHECK(std::abs(std::sqrt(c0 / n) - 5.0) < 0.1);
}

TEST_CASE("sensor config validation") {
  SensorConfig c;
  c.noise_autocorrelation = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.noise_sd = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.sample_period = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("pump quantization") {
  PumpConfig pump;
  CHECK(quantize_basal(pump, -0.3, 5.0) == 0.0);
  CHECK(quantize_basal(pump, 1.27, 5.0) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(quantize_basal(pump, 6.0, 5.0) == 5.0);
  CHECK(quantize_basal(pump, 0.15, 5.0) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(quantize_bolus(pump, -2.0) == 0.0);
  CHECK(quantize_bolus(pump, 3.33) == doctest::Approx(3.3).epsilon(1e-15));
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double rate = -1.0 + 7.0 * uniform01(rng);
    const double q = quantize_basal(pump, rate, 5.0);
    REQUIRE(q >= 0.0);
    REQUIRE(q <= 5.0);
    REQUIRE(q <= std::max(rate, 0.0) + 1e-9);
    REQUIRE(std::abs(q / 0.05 - std::round(q / 0.05)) < 1e-9);
  }
}

TEST_CASE("meal schedule: degenerate distributions and ordering") {
  const MealProfile profile = default_meal_profile();
  Rng rng(4);
  auto meals = generate_meal_schedule(profile, 0.0, false, rng);
  REQUIRE(meals.size() == 3);
  CHECK(meals[0].time == 420.0);
  CHECK(meals[1].time == 750.0);
  CHECK(meals[2].time == 1110.0);
  for (const auto& m : meals) {
    CHECK_FALSE(m.is_snack);
    CHECK(m.carbs >= 0.0);
    CHECK(m.announced_carbs == m.carbs);
  }

  auto all = generate_meal_schedule(profile, 30.0, true, rng);
  CHECK(all.size() == 6);
  CHECK(std::is_sorted(all.begin(), all.end(),
                       [](const MealEvent& a, const MealEvent& b) { return a.time < b.time; }));
  for (const auto& m : all) {
    CHECK(m.time >= 0.0);
    CHECK(m.time < kMinutesPerDay);
  }

  MealProfile fixed = profile;
  for (auto& slot : fixed.slots) slot.carb_sd = 0.0;
  Rng r1(1), r2(999);
  const auto a = generate_meal_schedule(fixed, 0.0, true, r1);
  const auto b = generate_meal_schedule(fixed, 0.0, true, r2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].time == b[i].time);
    CHECK(a[i].carbs == b[i].carbs);
  }
}

TEST_CASE("meal times scatter with the requested sd") {
  const MealProfile profile = default_meal_profile();
  Rng rng(6);
  std::vector<double> lunch;
  for (int day = 0; day < 20000; ++day) {
    for (const auto& m : generate_meal_schedule(profile, 60.0, false, rng)) {
      if (m.time > 600 && m.time < 930) lunch.push_back(m.time);
    }
  }
  // Lunch slot sits at 750 min; the window cuts only far tails of the neighbours.
  double mean = 0.0;
  for (double t : lunch) mean += t;
  mean /= static_cast<double>(lunch.size());
  double var = 0.0;
  for (double t : lunch) var += (t - mean) * (t - mean);
  const double sd = std::sqrt(var / static_cast<double>(lunch.size()));
  CHECK(std::abs(mean - 750.0) < 3.0);
  CHECK(std::abs(sd - 60.0) < 6.0);
}

TEST_CASE("meal profiles scale with body mass and load from the shipped file") {
  const MealProfile shipped = load_meal_profile(default_meal_profile_path());
  CHECK(shipped.slots.size() == 6);
  const MealProfile half = shipped.scaled_to(35.0);
  for (std::size_t i = 0; i < shipped.slots.size(); ++i) {
    CHECK(half.slots[i].mean_carbs == doctest::Approx(shipped.slots[i].mean_carbs / 2));
    CHECK(half.slots[i].mean_time == shipped.slots[i].mean_time);
  }
  Rng rng(1);
  CHECK_THROWS_AS(generate_meal_schedule(shipped, -1.0, true, rng), ConfigError);
}
