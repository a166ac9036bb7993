#pragma once

#include <array>
#include <cmath>

#include "glucolab/data/dataset.hpp"
#include "glucolab/util/random.hpp"

namespace oracle {

/// Two states, two actions. Action "high" moves to state 1, "low" to state
/// 0. Greedy one-step reward prefers "low" in state 0, but the discounted
/// optimum is high in state 0 and low in state 1.
struct TwoStateMdp {
  static constexpr double kLow = -0.8125;  // center of bin 1 of 16
  static constexpr double kHigh = 0.8125;  // center of bin 14 of 16
  static constexpr std::size_t kLowBin = 1;
  static constexpr std::size_t kHighBin = 14;
  // reward[state][action], action 0 = low, 1 = high
  std::array<std::array<double, 2>, 2> reward{{{-0.5, -1.5}, {1.5, -1.0}}};
  double discount = 0.9;

  static glucolab::FeatureVector features(int state) {
    glucolab::FeatureVector f{};
    f[0] = state == 0 ? 100.0 : 200.0;
    return f;
  }
  static int next_state(int action) { return action; }

  /// Q* by value iteration to machine precision.
  std::array<std::array<double, 2>, 2> q_values() const {
    std::array<double, 2> v{0.0, 0.0};
    std::array<std::array<double, 2>, 2> q{};
    for (int it = 0; it < 5000; ++it) {
      for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < 2; ++a) q[s][a] = reward[s][a] + discount * v[next_state(a)];
      }
      for (int s = 0; s < 2; ++s) v[s] = std::max(q[s][0], q[s][1]);
    }
    return q;
  }
  int optimal_action(int state) const {
    const auto q = q_values();
    return q[state][1] > q[state][0] ? 1 : 0;
  }

  /// Uniform coverage of all four state-action pairs, no terminals.
  glucolab::OfflineDataset dataset(std::size_t n, std::uint64_t seed, double reward_factor = 1.0) const {
    glucolab::Rng rng(seed);
    std::vector<glucolab::Transition> ts;
    ts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int s = static_cast<int>(rng() & 1U);
      const int a = static_cast<int>((rng() >> 1) & 1U);
      glucolab::Transition t;
      t.state = features(s);
      t.action = a == 1 ? kHigh : kLow;
      t.reward = reward_factor * reward[s][a];
      t.next_state = features(next_state(a));
      ts.push_back(t);
    }
    return glucolab::make_dataset(std::move(ts));
  }
};

}  // namespace oracle
