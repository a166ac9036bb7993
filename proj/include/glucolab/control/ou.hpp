#pragma once

#include "glucolab/util/random.hpp"

namespace glucolab {

/// Ornstein-Uhlenbeck parameters in control-step time units.
struct OuParams {
  double theta = 0.05;  // 1/step
  double sigma = 0.2;   // U/h per sqrt(step)
  double mu = 0.0;      // U/h

  void validate() const;
};

/// Euler-Maruyama step: x + theta (mu - x) dt + sigma sqrt(dt) N(0, 1).
/// No draw is taken when sigma is zero.
double ou_step(const OuParams& params, double x, double dt, Rng& rng);

}  // namespace glucolab
