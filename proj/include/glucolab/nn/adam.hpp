#pragma once

#include <cstdint>

#include "glucolab/nn/network.hpp"

namespace glucolab::nn {

struct AdamConfig {
  double alpha = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  Gradient first_moment;
  Gradient second_moment;
  std::int64_t step_count = 0;

  static AdamState for_network(const Network& net, AdamConfig config = {});
};

/// Bias-corrected Adam: m <- b1 m + (1-b1) g; v <- b2 v + (1-b2) g^2;
/// w <- w - alpha * m_hat / (sqrt(v_hat) + eps).
void adam_step(Network& net, AdamState& state, const Gradient& grad);

}  // namespace glucolab::nn
