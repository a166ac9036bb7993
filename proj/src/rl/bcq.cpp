#include "glucolab/rl/bcq.hpp"

#include <cmath>
#include <limits>

#include "discrete_common.hpp"
#include "glucolab/nn/adam.hpp"
#include "glucolab/nn/loss.hpp"
#include "glucolab/util/errors.hpp"

namespace glucolab::rl {

void BcqConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("bcq: threshold must be in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("bcq: tau must be in (0, 1]");
  if (target_update_period < 1) throw ConfigError("bcq: target_update_period must be >= 1");
  if (batch_size < 1) throw ConfigError("bcq: batch_size must be >= 1");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("bcq: discount must be in (0, 1)");
  if (!(q_lr > 0.0)) throw ConfigError("bcq: learning rate must be > 0");
}

namespace {
constexpr double kLogitPenalty = 1e-2;
}

TrainResult train_bcq_discrete(const OfflineDataset& dataset, const BcqConfig& config,
                               std::uint64_t seed) {
  config.validate();
  const DiscreteActionMap map(config.n_bins);
  const TrainingData data = make_training_data(dataset, config.reward_scale);
  Rng init_rng(derive_seed(seed, 1));
  Rng batch_rng(derive_seed(seed, 2));

  const auto bins_count = static_cast<Eigen::Index>(map.size());
  nn::Network q = make_mlp(kFeatureDim, config.hidden, map.size(), nn::Activation::identity, init_rng);
  nn::Network behavior =
      make_mlp(kFeatureDim, config.hidden, map.size(), nn::Activation::identity, init_rng);
  nn::Network q_target = q;
  auto q_opt = nn::AdamState::for_network(q, {config.q_lr});
  auto behavior_opt = nn::AdamState::for_network(behavior, {config.q_lr});

  TrainResult result;
  result.losses.reserve(config.gradient_steps);
  nn::Tape q_tape, behavior_tape;
  const double batch = static_cast<double>(config.batch_size);

  for (std::size_t step = 1; step <= config.gradient_steps; ++step) {
    const Batch b = sample_batch(data, config.batch_size, batch_rng);
    const auto bins = detail::action_bins(b, map);

    // Constrained greedy bin at s' under the online Q, valued by the target.
    const nn::Matrix next_q = q.forward(b.next_states);
    const nn::Matrix next_probs = nn::softmax_columns(behavior.forward(b.next_states));
    const nn::Matrix next_target_q = q_target.forward(b.next_states);
    Eigen::RowVectorXd y(b.rewards.size());
    for (Eigen::Index j = 0; j < next_q.cols(); ++j) {
      const double peak = next_probs.col(j).maxCoeff();
      Eigen::Index best = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (Eigen::Index a = 0; a < bins_count; ++a) {
        if (next_probs(a, j) / peak >= config.threshold && next_q(a, j) > best_q) {
          best_q = next_q(a, j);
          best = a;
        }
      }
      y(j) = b.rewards(j) + config.discount * b.not_done(j) * next_target_q(best, j);
    }

    const nn::Matrix q_all = q.forward(b.states, q_tape);
    const auto td = nn::huber_loss(detail::gather(q_all, bins), y);
    if (!std::isfinite(td.value)) {
      throw NumericalError("bcq: non-finite loss at step " + std::to_string(step));
    }
    result.losses.push_back(td.value);
    auto gq = q.zero_gradient();
    q.backward(q_tape, detail::scatter(td.grad, bins, bins_count), &gq);
    nn::adam_step(q, q_opt, gq);

    const nn::Matrix logits = behavior.forward(b.states, behavior_tape);
    nn::Matrix dlogits = nn::softmax_columns(logits);
    for (Eigen::Index j = 0; j < logits.cols(); ++j) dlogits(bins[static_cast<std::size_t>(j)], j) -= 1.0;
    dlogits /= batch;
    dlogits += (2.0 * kLogitPenalty / static_cast<double>(logits.size())) * logits;
    auto gb = behavior.zero_gradient();
    behavior.backward(behavior_tape, dlogits, &gb);
    nn::adam_step(behavior, behavior_opt, gb);

    if (step % config.target_update_period == 0) nn::polyak_update(q_target, q, config.tau);
  }

  result.policy.kind = PolicyKind::discrete;
  result.policy.algorithm = "bcq";
  result.policy.stats = dataset.stats;
  result.policy.reward_scale = config.reward_scale;
  result.policy.network = std::move(q);
  result.policy.behavior = std::move(behavior);
  result.policy.bc_threshold = config.threshold;
  result.policy.action_map = map;
  return result;
}

}  // namespace glucolab::rl
