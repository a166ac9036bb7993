#pragma once

#include <cstdint>
#include <vector>

#include "glucolab/data/dataset.hpp"
#include "glucolab/rl/training.hpp"

namespace glucolab::rl {

struct CqlConfig {
  double q_lr = 3e-4;
  double cql_alpha = 1.0;  // conservatism weight
  double tau = 0.005;
  std::size_t target_update_period = 1;
  std::size_t batch_size = 256;
  std::size_t gradient_steps = 100000;
  double discount = 0.99;
  double reward_scale = 10.0;
  std::vector<std::size_t> hidden = {256, 256};
  std::size_t n_bins = 16;

  void validate() const;
};

/// Discrete conservative Q-learning: Huber TD loss against a max-over-bins
/// target plus cql_alpha * (logsumexp_b Q(s, b) - Q(s, a)). With
/// cql_alpha = 0 this is ordinary fitted Q-learning. `losses` records the
/// TD part only.
TrainResult train_cql_discrete(const OfflineDataset& dataset, const CqlConfig& config,
                               std::uint64_t seed);

/// Mean Q(s, bin(a)) over the dataset's own state-action pairs.
double mean_q_at_dataset_actions(const Policy& policy, const OfflineDataset& dataset);

}  // namespace glucolab::rl
