#include "glucolab/rl/replay.hpp"

#include "glucolab/util/errors.hpp"

namespace glucolab::rl {

TrainingData make_training_data(const OfflineDataset& dataset, double reward_scale) {
  if (dataset.transitions.empty()) throw ConfigError("training: dataset is empty");
  if (!(reward_scale > 0.0)) throw ConfigError("training: reward_scale must be > 0");
  const auto n = static_cast<Eigen::Index>(dataset.size());
  const auto dim = static_cast<Eigen::Index>(kFeatureDim);
  TrainingData d;
  d.states.resize(dim, n);
  d.next_states.resize(dim, n);
  d.actions.resize(n);
  d.rewards.resize(n);
  d.not_done.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& t = dataset.transitions[static_cast<std::size_t>(j)];
    const auto s = dataset.stats.standardize(t.state);
    const auto s2 = dataset.stats.standardize(t.next_state);
    for (Eigen::Index i = 0; i < dim; ++i) {
      d.states(i, j) = s[static_cast<std::size_t>(i)];
      d.next_states(i, j) = s2[static_cast<std::size_t>(i)];
    }
    d.actions(j) = t.action;
    d.rewards(j) = t.reward / reward_scale;
    d.not_done(j) = t.done ? 0.0 : 1.0;
  }
  return d;
}

Batch sample_batch(const TrainingData& data, std::size_t batch_size, Rng& rng) {
  Batch b;
  b.indices.resize(batch_size);
  std::uniform_int_distribution<Eigen::Index> pick(0, static_cast<Eigen::Index>(data.size()) - 1);
  for (auto& i : b.indices) i = pick(rng);
  b.states = data.states(Eigen::all, b.indices);
  b.next_states = data.next_states(Eigen::all, b.indices);
  b.actions = data.actions(b.indices);
  b.rewards = data.rewards(b.indices);
  b.not_done = data.not_done(b.indices);
  return b;
}

nn::Network make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                     std::size_t output_dim, nn::Activation output_activation, Rng& rng) {
  std::vector<std::size_t> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output_dim);
  std::vector<nn::Activation> acts(hidden.size(), nn::Activation::relu);
  acts.push_back(output_activation);
  return nn::Network(sizes, acts, rng);
}

}  // namespace glucolab::rl
