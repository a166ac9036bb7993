#pragma once

#include <vector>

#include "glucolab/rl/policy.hpp"

namespace glucolab::rl {

/// Output of every learner.
struct TrainResult {
  Policy policy;
  /// Critic / Q loss of every gradient step (TD part for CQL).
  std::vector<double> losses;
  /// Critic loss on a held-out dataset at each checkpoint (TD3-BC only).
  std::vector<double> holdout_losses;
  /// The same loss divided by twice the variance of the held-out TD targets.
  /// Raw TD loss grows while values grow from their initial scale; this one
  /// does not.
  std::vector<double> holdout_relative_losses;
};

}  // namespace glucolab::rl
