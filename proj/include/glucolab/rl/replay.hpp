#pragma once

#include <vector>

#include "glucolab/data/dataset.hpp"
#include "glucolab/nn/network.hpp"
#include "glucolab/util/random.hpp"

namespace glucolab::rl {

/// Dataset laid out column-wise for batched training: standardized states,
/// rewards divided by `reward_scale`, and a not-done mask.
struct TrainingData {
  nn::Matrix states;       // feature_dim x N
  nn::Matrix next_states;  // feature_dim x N
  Eigen::RowVectorXd actions;
  Eigen::RowVectorXd rewards;
  Eigen::RowVectorXd not_done;

  std::size_t size() const { return static_cast<std::size_t>(states.cols()); }
};

TrainingData make_training_data(const OfflineDataset& dataset, double reward_scale);

struct Batch {
  std::vector<Eigen::Index> indices;
  nn::Matrix states;
  nn::Matrix next_states;
  Eigen::RowVectorXd actions;
  Eigen::RowVectorXd rewards;
  Eigen::RowVectorXd not_done;
};

/// Uniform sampling with replacement.
Batch sample_batch(const TrainingData& data, std::size_t batch_size, Rng& rng);

/// Builds hidden-layer relu networks ending in `output_activation`.
nn::Network make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                     std::size_t output_dim, nn::Activation output_activation, Rng& rng);

}  // namespace glucolab::rl
