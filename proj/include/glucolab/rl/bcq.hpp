#pragma once

#include <cstdint>
#include <vector>

#include "glucolab/data/dataset.hpp"
#include "glucolab/rl/training.hpp"

namespace glucolab::rl {

struct BcqConfig {
  double q_lr = 3e-4;
  double threshold = 0.3;  // likelihood ratio vs the most likely bin
  double tau = 0.005;
  std::size_t target_update_period = 1;  // steps between target updates
  std::size_t batch_size = 256;
  std::size_t gradient_steps = 100000;
  double discount = 0.99;
  double reward_scale = 10.0;
  std::vector<std::size_t> hidden = {256, 256};
  std::size_t n_bins = 16;

  void validate() const;
};

/// Discrete batch-constrained Q-learning over binned basal actions. A
/// behavior network is fit by cross-entropy; Q targets and greedy actions
/// only consider bins whose behavior probability is at least `threshold`
/// times the most likely bin's.
TrainResult train_bcq_discrete(const OfflineDataset& dataset, const BcqConfig& config,
                               std::uint64_t seed);

}  // namespace glucolab::rl
