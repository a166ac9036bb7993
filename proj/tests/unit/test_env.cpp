#include <doctest.h>

#include <cmath>
#include <vector>

#include "glucolab/control/pid_controller.hpp"
#include "glucolab/control/tuner.hpp"
#include "glucolab/env/features.hpp"
#include "glucolab/env/glucose_env.hpp"
#include "glucolab/env/risk.hpp"
#include "glucolab/util/errors.hpp"

using namespace glucolab;

namespace {

long double risk_oracle(long double g) {
  const long double inner = 3.5506L * (std::pow(std::log(g), 0.8353L) - 3.7932L);
  return 10.0L * inner * inner;
}

const std::vector<PatientParams>& cohort() {
  static const auto c = load_cohort(default_cohort_path());
  return c;
}

struct Columns {
  std::vector<double> cgm, basal, bolus, carbs;
  RawHistoryView view() const { return {cgm, basal, bolus, carbs}; }
};

Columns zeros(std::size_t n) {
  Columns c;
  c.cgm.assign(n, 120.0);
  c.basal.assign(n, 0.0);
  c.bolus.assign(n, 0.0);
  c.carbs.assign(n, 0.0);
  return c;
}

}  // namespace

TEST_CASE("magni_risk matches a long double evaluation") {
  for (double g : {50.0, 70.0, 120.0, 138.94, 144.0, 180.0, 300.0, 600.0}) {
    const long double expected = risk_oracle(g);
    const double got = magni_risk(g);
    if (expected > 1e-6L) {
      CHECK(std::abs((got - expected) / expected) < 1e-9L);
    } else {
      CHECK(std::abs(got - expected) < 1e-9L);
    }
  }
  CHECK(magni_risk(50.0) == doctest::Approx(56.28).epsilon(1e-3));
  CHECK(magni_risk(300.0) == doctest::Approx(30.12).epsilon(1e-3));
  CHECK(magni_risk(300.0) < magni_risk(50.0));
  // exp(3.7932^(1/0.8353)) = 138.8897..., so 138.94 sits just off the minimum.
  CHECK(magni_risk(138.94) < 1e-5);
  CHECK(magni_risk(138.8897329979969) < 1e-20);
  CHECK_THROWS_AS(magni_risk(0.0), Error);
  CHECK_THROWS_AS(magni_risk(-3.0), Error);
}

TEST_CASE("magni_risk minimum found by golden-section search") {
  long double a = 100.0L, b = 200.0L;
  const long double phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  for (int i = 0; i < 200; ++i) {
    const long double c = b - phi * (b - a), d = a + phi * (b - a);
    if (risk_oracle(c) < risk_oracle(d)) b = d; else a = c;
  }
  const long double argmin = (a + b) / 2.0L;
  CHECK(std::abs(argmin - 138.8897329979969L) < 1e-6L);
  CHECK(std::abs(magni_risk_minimum() - argmin) < 1e-6L);
  for (double g = 2.0; g < 1000.0; g += 0.73) REQUIRE(magni_risk(g) >= 0.0);
}

TEST_CASE("featurize examples") {
  auto c = zeros(100);
  auto f = featurize(c.view(), 3.0, std::nullopt);
  CHECK(f[kInsulinActivityIndex] == 0.0);
  CHECK(f[kCarbActivityIndex] == 0.0);

  c.bolus[99 - 40] = 1.0;
  f = featurize(c.view(), 3.0, std::nullopt);
  CHECK(f[kInsulinActivityIndex] == doctest::Approx(0.5).epsilon(1e-14));

  // 1 U/h over 3-minute steps delivers 0.05 U per step.
  c = zeros(80);
  c.basal.assign(80, 1.0);
  f = featurize(c.view(), 3.0, HistoryPadding{120.0, 0.0});
  double weights = 0.0;
  for (int k = 0; k < 80; ++k) weights += (80.0 - k) / 80.0;
  CHECK(weights == doctest::Approx(40.5));
  CHECK(f[kInsulinActivityIndex] == doctest::Approx(0.05 * weights).epsilon(1e-12));
  CHECK(f[kInsulinActivityIndex] == doctest::Approx(2.025).epsilon(1e-12));

  c = zeros(100);
  c.carbs[99 - 79] = 50.0;
  c.carbs[99 - 80] = 70.0;  // outside the window
  f = featurize(c.view(), 3.0, std::nullopt);
  CHECK(f[kCarbActivityIndex] == doctest::Approx(50.0 / 80.0).epsilon(1e-14));
}

TEST_CASE("featurize glucose history order and padding") {
  Columns c = zeros(100);
  for (std::size_t i = 0; i < 100; ++i) c.cgm[i] = 40.0 + static_cast<double>(i);
  auto f = featurize(c.view(), 3.0, std::nullopt);
  for (std::size_t k = 0; k < kGlucoseHistoryLength; ++k) {
    CHECK(f[k] == 40.0 + 99.0 - 10.0 * static_cast<double>(k));
  }

  Columns empty = zeros(0);
  f = featurize(empty.view(), 3.0, HistoryPadding{150.0, 2.0});
  for (std::size_t k = 0; k < kGlucoseHistoryLength; ++k) CHECK(f[k] == 150.0);
  CHECK(f[kInsulinActivityIndex] == doctest::Approx(2.0 * 0.05 * 40.5));

  Columns shorter = zeros(89);
  CHECK_THROWS_AS(featurize(shorter.view(), 3.0, std::nullopt), Error);
  shorter.bolus.pop_back();
  CHECK_THROWS_AS(featurize(shorter.view(), 3.0, HistoryPadding{}), Error);
}

TEST_CASE("featurize random histories against an independent sum") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 150);
    Columns c = zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
      c.cgm[i] = 39.0 + 561.0 * uniform01(rng);
      c.basal[i] = 5.0 * uniform01(rng);
      c.bolus[i] = uniform01(rng) < 0.05 ? 10.0 * uniform01(rng) : 0.0;
      c.carbs[i] = uniform01(rng) < 0.05 ? 80.0 * uniform01(rng) : 0.0;
    }
    const HistoryPadding pad{130.0, 1.1};
    const auto f = featurize(c.view(), 3.0, pad);
    double insulin = 0.0, carbs = 0.0;
    for (long t = 0; t < 80; ++t) {
      const long i = static_cast<long>(n) - 1 - t;
      const double w = 1.0 - t / 80.0;
      const double b = i >= 0 ? c.basal[i] : pad.basal;
      insulin += w * (b / 20.0 + (i >= 0 ? c.bolus[i] : 0.0));
      carbs += w * (i >= 0 ? c.carbs[i] : 0.0);
    }
    REQUIRE(f[kInsulinActivityIndex] == doctest::Approx(insulin).epsilon(1e-12));
    REQUIRE(f[kCarbActivityIndex] == doctest::Approx(carbs).epsilon(1e-12));
    REQUIRE(f[kInsulinActivityIndex] >= 0.0);
    REQUIRE(f[kCarbActivityIndex] >= 0.0);
  }
}

TEST_CASE("action normalization round-trips on the pump grid") {
  for (const auto& p : cohort()) {
    CHECK(denormalize_action(-1.0, p.max_basal) == 0.0);
    CHECK(denormalize_action(1.0, p.max_basal) == p.max_basal);
    CHECK(denormalize_action(7.0, p.max_basal) == p.max_basal);
    const int steps = static_cast<int>(std::floor(p.max_basal / 0.05 + 1e-9));
    for (int k = 0; k <= steps; ++k) {
      const double x = quantize_basal(PumpConfig{}, k * 0.05, p.max_basal);
      const double round = denormalize_action(normalize_action(x, p.max_basal), p.max_basal);
      REQUIRE(round == doctest::Approx(x).epsilon(1e-13));
      REQUIRE(quantize_basal(PumpConfig{}, round + 1e-12, p.max_basal) == x);
    }
  }
}

TEST_CASE("env step rewards follow the true glucose") {
  const auto& p = cohort().front();
  EnvConfig config;
  config.episode.length_days = 2.0;
  GlucoseEnv env(p, config, 4);
  PidController pid(tune_pid(GridSpec::default_grid(), p, 1, config));
  std::size_t n = 0;
  while (!env.done()) {
    const auto rec = env.step(pid.act(env));
    ++n;
    REQUIRE(rec.reward <= 0.0);
    REQUIRE_FALSE(rec.failed);
    REQUIRE(rec.reward == -magni_risk(rec.true_glucose));
    REQUIRE(rec.true_glucose == env.patient_state().plasma_glucose);
    REQUIRE(rec.cgm >= 39.0);
    REQUIRE(rec.cgm <= 600.0);
    REQUIRE(rec.done == (n == 960));
    const auto obs = env.observation();
    REQUIRE(obs[0] == rec.cgm);
  }
  CHECK(n == 960);
  CHECK_THROWS_AS(env.step(0.0), Error);
  CHECK_THROWS_AS(GlucoseEnv(p, config, 4).step(std::nan("")), NumericalError);
}

TEST_CASE("hypoglycemic exit adds the termination penalty") {
  PatientParams p = cohort().front();
  p.carb_ratio = 0.5;  // grossly oversized meal boluses
  GlucoseEnv env(p, EnvConfig{}, 9);
  StepRecord last;
  while (!env.done()) last = env.step(1.0);
  CHECK(last.failed);
  CHECK(last.done);
  CHECK(last.true_glucose < 10.0);
  CHECK(last.reward == -1e5 - magni_risk(last.true_glucose));
  CHECK(env.steps_taken() < 4800);
}

TEST_CASE("tuned PID runs full 10-day episodes") {
  for (const auto& p : cohort()) {
    CAPTURE(p.id);
    const PidParams tuned = tune_pid(GridSpec::default_grid(), p, 1, EnvConfig{});
    GlucoseEnv env(p, EnvConfig{}, 1234);
    PidController pid(tuned);
    bool failed = false;
    while (!env.done()) failed = env.step(pid.act(env)).failed || failed;
    CHECK_FALSE(failed);
    CHECK(env.steps_taken() == 4800);
    CHECK(EpisodeConfig{}.horizon_steps() == 4800);
  }
}

TEST_CASE("reset restores equilibrium and same seeds replay") {
  const auto& p = cohort()[1];
  GlucoseEnv a(p, EnvConfig{}, 17), b(p, EnvConfig{}, 17);
  for (int i = 0; i < 500; ++i) {
    const auto ra = a.step(0.0), rb = b.step(0.0);
    REQUIRE(ra.cgm == rb.cgm);
    REQUIRE(ra.true_glucose == rb.true_glucose);
  }
  a.reset();
  CHECK(a.steps_taken() == 0);
  CHECK(a.patient_state() == equilibrium_state(p));
  CHECK(a.latest_cgm() == a.padding().cgm);

  EnvConfig bad;
  bad.episode.length_days = 0.0;
  CHECK_THROWS_AS(GlucoseEnv(p, bad, 1), ConfigError);
  bad = {};
  bad.episode.glucose_lower = 2000.0;
  CHECK_THROWS_AS(GlucoseEnv(p, bad, 1), ConfigError);
}
