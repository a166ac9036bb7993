#include "glucolab/rl/cql.hpp"

#include <cmath>

#include "discrete_common.hpp"
#include "glucolab/nn/adam.hpp"
#include "glucolab/nn/loss.hpp"
#include "glucolab/util/errors.hpp"

namespace glucolab::rl {

void CqlConfig::validate() const {
  if (!(cql_alpha >= 0.0)) throw ConfigError("cql: cql_alpha must be >= 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("cql: tau must be in (0, 1]");
  if (target_update_period < 1) throw ConfigError("cql: target_update_period must be >= 1");
  if (batch_size < 1) throw ConfigError("cql: batch_size must be >= 1");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("cql: discount must be in (0, 1)");
  if (!(q_lr > 0.0)) throw ConfigError("cql: learning rate must be > 0");
}

TrainResult train_cql_discrete(const OfflineDataset& dataset, const CqlConfig& config,
                               std::uint64_t seed) {
  config.validate();
  const DiscreteActionMap map(config.n_bins);
  const TrainingData data = make_training_data(dataset, config.reward_scale);
  Rng init_rng(derive_seed(seed, 1));
  Rng batch_rng(derive_seed(seed, 2));

  const auto bins_count = static_cast<Eigen::Index>(map.size());
  nn::Network q = make_mlp(kFeatureDim, config.hidden, map.size(), nn::Activation::identity, init_rng);
  nn::Network q_target = q;
  auto q_opt = nn::AdamState::for_network(q, {config.q_lr});

  TrainResult result;
  result.losses.reserve(config.gradient_steps);
  nn::Tape tape;
  const double batch = static_cast<double>(config.batch_size);

  for (std::size_t step = 1; step <= config.gradient_steps; ++step) {
    const Batch b = sample_batch(data, config.batch_size, batch_rng);
    const auto bins = detail::action_bins(b, map);

    const Eigen::RowVectorXd next_best = q_target.forward(b.next_states).colwise().maxCoeff();
    const Eigen::RowVectorXd y = b.rewards + config.discount * b.not_done.cwiseProduct(next_best);

    const nn::Matrix q_all = q.forward(b.states, tape);
    const auto td = nn::huber_loss(detail::gather(q_all, bins), y);
    if (!std::isfinite(td.value)) {
      throw NumericalError("cql: non-finite loss at step " + std::to_string(step));
    }
    result.losses.push_back(td.value);
    nn::Matrix dq = detail::scatter(td.grad, bins, bins_count);
    if (config.cql_alpha > 0.0) {
      nn::Matrix push = nn::softmax_columns(q_all);
      for (Eigen::Index j = 0; j < q_all.cols(); ++j) push(bins[static_cast<std::size_t>(j)], j) -= 1.0;
      dq += (config.cql_alpha / batch) * push;
    }
    auto grad = q.zero_gradient();
    q.backward(tape, dq, &grad);
    nn::adam_step(q, q_opt, grad);

    if (step % config.target_update_period == 0) nn::polyak_update(q_target, q, config.tau);
  }

  result.policy.kind = PolicyKind::discrete;
  result.policy.algorithm = "cql";
  result.policy.stats = dataset.stats;
  result.policy.reward_scale = config.reward_scale;
  result.policy.network = std::move(q);
  result.policy.action_map = map;
  return result;
}

double mean_q_at_dataset_actions(const Policy& policy, const OfflineDataset& dataset) {
  if (policy.kind != PolicyKind::discrete) throw Error("mean_q: discrete policy required");
  if (dataset.transitions.empty()) throw Error("mean_q: empty dataset");
  double total = 0.0;
  for (const auto& t : dataset.transitions) {
    const auto z = policy.stats.standardize(t.state);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
    const Eigen::VectorXd qv = policy.network.forward(x);
    total += qv(static_cast<Eigen::Index>(policy.action_map.bin_of(t.action)));
  }
  return total / static_cast<double>(dataset.transitions.size());
}

}  // namespace glucolab::rl
