#include "glucolab/rl/td3bc.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "glucolab/nn/adam.hpp"
#include "glucolab/nn/loss.hpp"
#include "glucolab/rl/replay.hpp"
#include "glucolab/util/errors.hpp"

namespace glucolab::rl {

void Td3BcConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("td3bc: alpha must be > 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("td3bc: tau must be in (0, 1]");
  if (policy_delay < 1) throw ConfigError("td3bc: policy_delay must be >= 1");
  if (batch_size < 1) throw ConfigError("td3bc: batch_size must be >= 1");
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("td3bc: discount must be in (0, 1)");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("td3bc: learning rates must be > 0");
  if (!(policy_noise >= 0.0) || !(noise_clip >= 0.0)) throw ConfigError("td3bc: noise must be >= 0");
}

namespace {

nn::Matrix stack(const nn::Matrix& states, const Eigen::RowVectorXd& actions) {
  nn::Matrix x(states.rows() + 1, states.cols());
  x.topRows(states.rows()) = states;
  x.row(states.rows()) = actions;
  return x;
}

struct Critics {
  nn::Network q1, q2;
};

struct HoldoutLoss {
  double absolute = 0.0;
  double relative = 0.0;  // absolute / (2 var(y))
};

HoldoutLoss critic_loss(const Critics& critics, const Critics& targets, const nn::Network& actor_target,
                   const Batch& b, double discount, const Eigen::RowVectorXd& noise) {
  const Eigen::RowVectorXd next_action =
      (actor_target.forward(b.next_states).row(0) + noise).cwiseMax(-1.0).cwiseMin(1.0);
  const nn::Matrix next_input = stack(b.next_states, next_action);
  const Eigen::RowVectorXd target_q =
      targets.q1.forward(next_input).row(0).cwiseMin(targets.q2.forward(next_input).row(0));
  const Eigen::RowVectorXd y = b.rewards + discount * b.not_done.cwiseProduct(target_q);
  const nn::Matrix input = stack(b.states, b.actions);
  HoldoutLoss out;
  out.absolute = nn::mse_loss(critics.q1.forward(input), y).value +
                 nn::mse_loss(critics.q2.forward(input), y).value;
  const double variance = (y.array() - y.mean()).square().mean();
  out.relative = out.absolute / (2.0 * std::max(variance, 1e-12));
  return out;
}

}  // namespace

TrainResult train_td3bc(const OfflineDataset& dataset, const Td3BcConfig& config,
                        std::uint64_t seed, const OfflineDataset* holdout) {
  config.validate();
  const TrainingData data = make_training_data(dataset, config.reward_scale);
  std::optional<TrainingData> held;
  if (holdout) {
    // Held-out rows are standardized with the training statistics.
    OfflineDataset copy = *holdout;
    copy.stats = dataset.stats;
    held = make_training_data(copy, config.reward_scale);
  }

  Rng init_rng(derive_seed(seed, 1));
  Rng batch_rng(derive_seed(seed, 2));
  Rng noise_rng(derive_seed(seed, 3));
  Rng holdout_rng(derive_seed(seed, 4));

  const std::size_t dim = kFeatureDim;
  nn::Network actor = make_mlp(dim, config.hidden, 1, nn::Activation::tanh, init_rng);
  Critics critics{make_mlp(dim + 1, config.hidden, 1, nn::Activation::identity, init_rng),
                  make_mlp(dim + 1, config.hidden, 1, nn::Activation::identity, init_rng)};
  nn::Network actor_target = actor;
  Critics targets = critics;
  auto actor_opt = nn::AdamState::for_network(actor, {config.actor_lr});
  auto q1_opt = nn::AdamState::for_network(critics.q1, {config.critic_lr});
  auto q2_opt = nn::AdamState::for_network(critics.q2, {config.critic_lr});

  TrainResult result;
  result.losses.reserve(config.gradient_steps);
  nn::Tape tape1, tape2, actor_tape;
  const double batch = static_cast<double>(config.batch_size);

  const auto sample_noise = [&](std::size_t n, Rng& rng) {
    Eigen::RowVectorXd noise(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < noise.size(); ++i) {
      noise(i) = std::clamp(config.policy_noise * standard_normal(rng), -config.noise_clip,
                            config.noise_clip);
    }
    return noise;
  };

  for (std::size_t step = 1; step <= config.gradient_steps; ++step) {
    const Batch b = sample_batch(data, config.batch_size, batch_rng);

    // Critic update.
    const Eigen::RowVectorXd noise = sample_noise(config.batch_size, noise_rng);
    const Eigen::RowVectorXd next_action =
        (actor_target.forward(b.next_states).row(0) + noise).cwiseMax(-1.0).cwiseMin(1.0);
    const nn::Matrix next_input = stack(b.next_states, next_action);
    const Eigen::RowVectorXd target_q =
        targets.q1.forward(next_input).row(0).cwiseMin(targets.q2.forward(next_input).row(0));
    const nn::Matrix y = b.rewards + config.discount * b.not_done.cwiseProduct(target_q);

    const nn::Matrix input = stack(b.states, b.actions);
    const auto loss1 = nn::mse_loss(critics.q1.forward(input, tape1), y);
    const auto loss2 = nn::mse_loss(critics.q2.forward(input, tape2), y);
    const double loss = loss1.value + loss2.value;
    if (!std::isfinite(loss)) {
      throw NumericalError("td3bc: non-finite critic loss at step " + std::to_string(step));
    }
    result.losses.push_back(loss);
    auto g1 = critics.q1.zero_gradient();
    auto g2 = critics.q2.zero_gradient();
    critics.q1.backward(tape1, loss1.grad, &g1);
    critics.q2.backward(tape2, loss2.grad, &g2);
    nn::adam_step(critics.q1, q1_opt, g1);
    nn::adam_step(critics.q2, q2_opt, g2);

    // Delayed actor update.
    if (step % config.policy_delay == 0) {
      const nn::Matrix pi = actor.forward(b.states, actor_tape);
      const nn::Matrix q = critics.q1.forward(stack(b.states, pi.row(0)), tape1);
      const double lambda = config.alpha / q.cwiseAbs().mean();
      if (!std::isfinite(lambda)) {
        throw NumericalError("td3bc: non-finite actor scale at step " + std::to_string(step));
      }
      const nn::Matrix dq = nn::Matrix::Constant(1, q.cols(), -lambda / batch);
      const nn::Matrix dinput = critics.q1.backward(tape1, dq, nullptr);
      const nn::Matrix dpi = dinput.bottomRows(1) + (2.0 / batch) * (pi - b.actions);
      auto ga = actor.zero_gradient();
      actor.backward(actor_tape, dpi, &ga);
      nn::adam_step(actor, actor_opt, ga);

      nn::polyak_update(targets.q1, critics.q1, config.tau);
      nn::polyak_update(targets.q2, critics.q2, config.tau);
      nn::polyak_update(actor_target, actor, config.tau);
    }

    if (held && config.checkpoint_every > 0 && step % config.checkpoint_every == 0) {
      Rng eval_rng = holdout_rng;
      const Batch hb = sample_batch(*held, std::min<std::size_t>(held->size(), 2048), eval_rng);
      const auto h = critic_loss(critics, targets, actor_target, hb, config.discount,
                                 sample_noise(hb.indices.size(), eval_rng));
      result.holdout_losses.push_back(h.absolute);
      result.holdout_relative_losses.push_back(h.relative);
    }
  }

  result.policy.kind = PolicyKind::continuous;
  result.policy.algorithm = "td3bc";
  result.policy.stats = dataset.stats;
  result.policy.reward_scale = config.reward_scale;
  result.policy.network = std::move(actor);
  return result;
}

}  // namespace glucolab::rl
