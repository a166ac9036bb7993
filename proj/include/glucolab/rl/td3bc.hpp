#pragma once

#include <cstdint>
#include <vector>

#include "glucolab/data/dataset.hpp"
#include "glucolab/rl/training.hpp"

namespace glucolab::rl {

struct Td3BcConfig {
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double alpha = 2.5;         // BC-regularization scale
  double tau = 0.005;
  double policy_noise = 0.2;  // target smoothing noise, normalized action units
  double noise_clip = 0.5;
  std::size_t policy_delay = 2;
  std::size_t batch_size = 256;
  std::size_t gradient_steps = 100000;
  double discount = 0.99;
  double reward_scale = 10.0;  // rewards are divided by this
  std::vector<std::size_t> hidden = {256, 256};
  std::size_t checkpoint_every = 0;  // holdout evaluation cadence, 0 = never

  void validate() const;
};

/// TD3 with a behavior-cloning term: twin critics with clipped double-Q
/// targets and target policy smoothing; a delayed deterministic actor
/// minimizing  -lambda * Q1(s, pi(s)) + (pi(s) - a)^2  with
/// lambda = alpha / mean|Q1|.
TrainResult train_td3bc(const OfflineDataset& dataset, const Td3BcConfig& config,
                        std::uint64_t seed, const OfflineDataset* holdout = nullptr);

}  // namespace glucolab::rl
