#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "glucolab/control/tuner.hpp"
#include "glucolab/data/trajectory.hpp"
#include "glucolab/nn/adam.hpp"
#include "glucolab/nn/loss.hpp"
#include "glucolab/rl/bcq.hpp"
#include "glucolab/rl/cql.hpp"
#include "glucolab/rl/replay.hpp"
#include "glucolab/rl/td3bc.hpp"
#include "glucolab/util/errors.hpp"
#include "support/oracle_mdp.hpp"

using namespace glucolab;
using namespace glucolab::rl;
using oracle::TwoStateMdp;

namespace {

Td3BcConfig small_td3bc(std::size_t steps = 3000) {
  Td3BcConfig c;
  c.hidden = {32, 32};
  c.batch_size = 128;
  c.gradient_steps = steps;
  c.reward_scale = 1.0;
  c.actor_lr = c.critic_lr = 1e-3;
  return c;
}

BcqConfig small_bcq(std::size_t steps = 3000) {
  BcqConfig c;
  c.hidden = {32, 32};
  c.batch_size = 128;
  c.gradient_steps = steps;
  c.reward_scale = 1.0;
  c.q_lr = 1e-3;
  return c;
}

CqlConfig small_cql(std::size_t steps = 3000) {
  CqlConfig c;
  c.hidden = {32, 32};
  c.batch_size = 128;
  c.gradient_steps = steps;
  c.reward_scale = 1.0;
  c.q_lr = 1e-3;
  return c;
}

const OfflineDataset& glucose_dataset() {
  static const OfflineDataset ds = [] {
    const auto cohort = load_cohort(default_cohort_path());
    const auto pid = tune_pid(GridSpec::default_grid(), cohort.front(), 1, EnvConfig{});
    return build_transitions(generate_dataset(cohort.front(), pid, 20000, OuParams{}, 0.1, 1));
  }();
  return ds;
}

int greedy_index(const Policy& p, int state) {
  const std::size_t bin = select_bin(p, TwoStateMdp::features(state));
  if (bin == TwoStateMdp::kHighBin) return 1;
  if (bin == TwoStateMdp::kLowBin) return 0;
  return -1;
}

}  // namespace

TEST_CASE("action map partitions [-1, 1]") {
  const DiscreteActionMap map(16);
  const auto edges = map.edges();
  REQUIRE(edges.size() == 17);
  CHECK(edges.front() == -1.0);
  CHECK(edges.back() == 1.0);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(edges[i] < edges[i + 1]);
    CHECK(map.center(i) == doctest::Approx((edges[i] + edges[i + 1]) / 2));
    CHECK(map.bin_of(map.center(i)) == i);
    CHECK(map.bin_of(edges[i]) == i);
  }
  CHECK(map.bin_of(1.0) == 15);
  CHECK(map.center(TwoStateMdp::kLowBin) == TwoStateMdp::kLow);
  CHECK(map.center(TwoStateMdp::kHighBin) == TwoStateMdp::kHigh);
  CHECK_THROWS(DiscreteActionMap(0));
}

TEST_CASE("config validation") {
  Td3BcConfig t;
  t.alpha = 0.0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {};
  t.policy_delay = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {};
  t.tau = 1.5;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  BcqConfig b;
  b.threshold = 1.2;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  CqlConfig c;
  c.cql_alpha = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.discount = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(train_cql_discrete(make_dataset({}), small_cql(), 1), ConfigError);
}

TEST_CASE("TD3-BC clones a constant action when the BC term dominates") {
  const double target = 0.3;
  auto transitions = glucose_dataset().transitions;
  transitions.resize(5000);
  for (auto& t : transitions) {
    t.action = target;
    t.reward = -1.0;
  }
  const auto ds = make_dataset(transitions);
  // The critic never sees another action, so its action slope is arbitrary;
  // a small alpha keeps the Q term from moving the actor off the data.
  auto config = small_td3bc(5000);
  config.alpha = 0.1;
  const auto result = train_td3bc(ds, config, 3);
  double worst = 0.0;
  for (std::size_t i = 0; i < ds.size(); i += 50) {
    worst = std::max(worst, std::abs(act(result.policy, ds.transitions[i].state) - target));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("all learners recover the value-iteration optimum on the two-state MDP") {
  const TwoStateMdp mdp;
  REQUIRE(mdp.optimal_action(0) == 1);
  REQUIRE(mdp.optimal_action(1) == 0);
  const auto ds = mdp.dataset(10000, 17);

  auto td3 = small_td3bc();
  td3.discount = mdp.discount;
  const auto actor = train_td3bc(ds, td3, 1).policy;
  for (int s = 0; s < 2; ++s) {
    const double a = act(actor, TwoStateMdp::features(s));
    const int nearest = std::abs(a - TwoStateMdp::kHigh) < std::abs(a - TwoStateMdp::kLow) ? 1 : 0;
    CHECK(nearest == mdp.optimal_action(s));
  }

  auto bcq = small_bcq();
  bcq.discount = mdp.discount;
  const auto bcq_policy = train_bcq_discrete(ds, bcq, 1).policy;
  auto cql = small_cql();
  cql.discount = mdp.discount;
  const auto cql_policy = train_cql_discrete(ds, cql, 1).policy;
  for (int s = 0; s < 2; ++s) {
    CHECK(greedy_index(bcq_policy, s) == mdp.optimal_action(s));
    CHECK(greedy_index(cql_policy, s) == mdp.optimal_action(s));
  }

  // BCQ's Q at the dataset actions approaches Q*.
  const auto q_star = mdp.q_values();
  for (int s = 0; s < 2; ++s) {
    const auto z = bcq_policy.stats.standardize(TwoStateMdp::features(s));
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(z.data(), kFeatureDim);
    const Eigen::VectorXd q = bcq_policy.network.forward(x);
    CHECK(q(TwoStateMdp::kLowBin) == doctest::Approx(q_star[s][0]).epsilon(0.1));
    CHECK(q(TwoStateMdp::kHighBin) == doctest::Approx(q_star[s][1]).epsilon(0.1));
  }
}

TEST_CASE("BCQ threshold limits") {
  // Behavior prefers bin 3 in state 0 and bin 12 in state 1, with other
  // bins observed less often.
  Rng rng(5);
  const DiscreteActionMap map(16);
  std::vector<Transition> ts;
  for (int i = 0; i < 6000; ++i) {
    const int s = static_cast<int>(rng() & 1U);
    const double u = uniform01(rng);
    std::size_t bin = s == 0 ? 3 : 12;
    if (u > 0.6) bin = static_cast<std::size_t>(uniform01(rng) * 16) % 16;
    Transition t;
    t.state = TwoStateMdp::features(s);
    t.next_state = TwoStateMdp::features(static_cast<int>(rng() & 1U));
    t.action = map.center(bin);
    t.reward = bin == 7 ? 1.0 : -1.0;
    ts.push_back(t);
  }
  const auto ds = make_dataset(ts);

  auto full = small_bcq(2000);
  full.threshold = 1.0;
  const auto cloned = train_bcq_discrete(ds, full, 2).policy;
  for (int s = 0; s < 2; ++s) {
    const auto z = cloned.stats.standardize(TwoStateMdp::features(s));
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(z.data(), kFeatureDim);
    Eigen::Index argmax = 0;
    cloned.behavior->forward(x).col(0).maxCoeff(&argmax);
    CHECK(select_bin(cloned, TwoStateMdp::features(s)) == static_cast<std::size_t>(argmax));
    CHECK(argmax == (s == 0 ? 3 : 12));
  }

  auto open = small_bcq(2000);
  open.threshold = 0.0;
  const auto greedy = train_bcq_discrete(ds, open, 2).policy;
  for (int s = 0; s < 2; ++s) {
    const auto z = greedy.stats.standardize(TwoStateMdp::features(s));
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(z.data(), kFeatureDim);
    Eigen::Index argmax = 0;
    greedy.network.forward(x).col(0).maxCoeff(&argmax);
    CHECK(select_bin(greedy, TwoStateMdp::features(s)) == static_cast<std::size_t>(argmax));
  }

  Eigen::VectorXd logits(3);
  logits << 0.0, std::log(0.3), std::log(0.29);
  CHECK(allowed_bins(logits, 0.3) == std::vector<bool>{true, true, false});
  CHECK(allowed_bins(logits, 0.0) == std::vector<bool>{true, true, true});
  CHECK(allowed_bins(logits, 1.0) == std::vector<bool>{true, false, false});
}

TEST_CASE("BCQ avoids an unobserved dangerous action that unconstrained Q-learning picks") {
  // Only the lower half of the action range appears in the data. In the
  // true MDP every upper-half action costs -100 per step; observed actions
  // cost -1. Untrained Q outputs for unseen bins sit near zero, above the
  // learned values of about -10.
  Rng rng(6);
  const DiscreteActionMap map(16);
  std::vector<Transition> ts;
  for (int i = 0; i < 8000; ++i) {
    const int s = static_cast<int>(rng() & 1U);
    Transition t;
    t.state = TwoStateMdp::features(s);
    t.next_state = TwoStateMdp::features(static_cast<int>(rng() & 1U));
    t.action = map.center(static_cast<std::size_t>(uniform01(rng) * 8) % 8);
    t.reward = -1.0;
    ts.push_back(t);
  }
  const auto ds = make_dataset(ts);
  const auto dangerous = [](std::size_t bin) { return bin >= 8; };

  auto constrained = small_bcq(3000);
  const auto bcq = train_bcq_discrete(ds, constrained, 4).policy;
  auto unconstrained = small_bcq(3000);
  unconstrained.threshold = 0.0;
  const auto q_learning = train_bcq_discrete(ds, unconstrained, 4).policy;
  int unconstrained_hits = 0;
  for (int s = 0; s < 2; ++s) {
    CHECK_FALSE(dangerous(select_bin(bcq, TwoStateMdp::features(s))));
    unconstrained_hits += dangerous(select_bin(q_learning, TwoStateMdp::features(s)));
  }
  CHECK(unconstrained_hits > 0);
}

TEST_CASE("CQL with alpha 0 is fitted Q-learning") {
  const TwoStateMdp mdp;
  const auto ds = mdp.dataset(3000, 8);
  auto config = small_cql(300);
  config.cql_alpha = 0.0;
  config.discount = mdp.discount;
  const std::uint64_t seed = 9;
  const auto result = train_cql_discrete(ds, config, seed);

  // Reference loop written directly from the nn primitives.
  const DiscreteActionMap map(config.n_bins);
  const TrainingData data = make_training_data(ds, config.reward_scale);
  Rng init_rng(derive_seed(seed, 1)), batch_rng(derive_seed(seed, 2));
  nn::Network q = make_mlp(kFeatureDim, config.hidden, map.size(), nn::Activation::identity, init_rng);
  nn::Network target = q;
  auto opt = nn::AdamState::for_network(q, {config.q_lr});
  std::vector<double> losses;
  for (std::size_t step = 0; step < config.gradient_steps; ++step) {
    const Batch b = sample_batch(data, config.batch_size, batch_rng);
    const nn::Matrix next = target.forward(b.next_states);
    nn::Tape tape;
    const nn::Matrix all = q.forward(b.states, tape);
    Eigen::RowVectorXd taken(all.cols()), y(all.cols());
    std::vector<Eigen::Index> bins(all.cols());
    for (Eigen::Index j = 0; j < all.cols(); ++j) {
      bins[j] = static_cast<Eigen::Index>(map.bin_of(b.actions(j)));
      taken(j) = all(bins[j], j);
      y(j) = b.rewards(j) + config.discount * b.not_done(j) * next.col(j).maxCoeff();
    }
    const auto loss = nn::huber_loss(taken, y);
    losses.push_back(loss.value);
    nn::Matrix dq = nn::Matrix::Zero(all.rows(), all.cols());
    for (Eigen::Index j = 0; j < all.cols(); ++j) dq(bins[j], j) = loss.grad(j);
    auto grad = q.zero_gradient();
    q.backward(tape, dq, &grad);
    nn::adam_step(q, opt, grad);
    nn::polyak_update(target, q, config.tau);
  }
  CHECK(losses == result.losses);
  CHECK(q == result.policy.network);
}

TEST_CASE("CQL is conservative at dataset actions") {
  const TwoStateMdp mdp;
  const auto ds = mdp.dataset(10000, 10);
  auto plain = small_cql(2000);
  plain.cql_alpha = 0.0;
  plain.discount = mdp.discount;
  auto conservative = plain;
  conservative.cql_alpha = 1.0;
  const double q0 = mean_q_at_dataset_actions(train_cql_discrete(ds, plain, 11).policy, ds);
  const double q1 = mean_q_at_dataset_actions(train_cql_discrete(ds, conservative, 11).policy, ds);
  CHECK(q1 <= q0);
}

TEST_CASE("logsumexp shifts exactly with the Q values") {
  nn::Matrix q(4, 2);
  q << 0.5, -1.25, 3.0, 2.0, -7.75, 0.0, 1.0, 1.0;
  const double c = 1024.0;
  const nn::Matrix shifted = q.array() + c;
  const auto a = nn::logsumexp_columns(q), b = nn::logsumexp_columns(shifted);
  CHECK(b(0) == a(0) + c);
  CHECK(b(1) == a(1) + c);
  const nn::Matrix huge = q.array() + 1e300;
  CHECK(nn::logsumexp_columns(huge).allFinite());
}

TEST_CASE("training is deterministic per seed") {
  const TwoStateMdp mdp;
  const auto ds = mdp.dataset(2000, 12);
  const auto t1 = train_td3bc(ds, small_td3bc(200), 5), t2 = train_td3bc(ds, small_td3bc(200), 5);
  const auto t3 = train_td3bc(ds, small_td3bc(200), 6);
  CHECK(t1.policy.network == t2.policy.network);
  CHECK(t1.losses == t2.losses);
  CHECK_FALSE(t1.policy.network == t3.policy.network);
  CHECK(train_bcq_discrete(ds, small_bcq(200), 5).policy.network ==
        train_bcq_discrete(ds, small_bcq(200), 5).policy.network);
  CHECK(train_cql_discrete(ds, small_cql(200), 5).policy.network ==
        train_cql_discrete(ds, small_cql(200), 5).policy.network);
}

TEST_CASE("policies act in range, discrete ones on bin centers, and persist") {
  const auto& ds = glucose_dataset();
  const auto td3 = train_td3bc(ds, small_td3bc(300), 1).policy;
  const auto bcq = train_bcq_discrete(ds, small_bcq(300), 1).policy;
  const auto cql = train_cql_discrete(ds, small_cql(300), 1).policy;
  const DiscreteActionMap map(16);
  std::set<double> centers;
  for (std::size_t i = 0; i < 16; ++i) centers.insert(map.center(i));
  Rng rng(13);
  const auto dir = std::filesystem::temp_directory_path() / "glucolab_test_rl";
  std::filesystem::create_directories(dir);
  std::vector<Policy> loaded;
  for (const auto* p : {&td3, &bcq, &cql}) {
    save_policy(dir / (p->algorithm + ".weights"), *p);
    loaded.push_back(load_policy(dir / (p->algorithm + ".weights")));
  }
  for (int i = 0; i < 500; ++i) {
    FeatureVector f{};
    for (std::size_t k = 0; k < kGlucoseHistoryLength; ++k) f[k] = 39.0 + 561.0 * uniform01(rng);
    f[kInsulinActivityIndex] = 20.0 * uniform01(rng);
    f[kCarbActivityIndex] = 200.0 * uniform01(rng);
    const double a = act(td3, f);
    REQUIRE(a >= -1.0);
    REQUIRE(a <= 1.0);
    REQUIRE(act(td3, f) == a);
    REQUIRE(centers.count(act(bcq, f)) == 1);
    REQUIRE(centers.count(act(cql, f)) == 1);
    REQUIRE(act(loaded[0], f) == a);
    REQUIRE(act(loaded[1], f) == act(bcq, f));
    REQUIRE(act(loaded[2], f) == act(cql, f));
  }
  CHECK(loaded[0].reward_scale == td3.reward_scale);
  CHECK(loaded[1].bc_threshold == bcq.bc_threshold);
  CHECK(loaded[1].behavior.has_value());
  CHECK(loaded[2].stats == cql.stats);
}

TEST_CASE("scaling rewards leaves discrete greedy policies unchanged") {
  const TwoStateMdp mdp;
  for (double k : {0.2, 5.0}) {
    CAPTURE(k);
    const auto base = mdp.dataset(10000, 14);
    const auto scaled = mdp.dataset(10000, 14, k);
    auto bcq = small_bcq();
    bcq.discount = mdp.discount;
    auto cql = small_cql();
    cql.discount = mdp.discount;
    const auto b0 = train_bcq_discrete(base, bcq, 3).policy, b1 = train_bcq_discrete(scaled, bcq, 3).policy;
    const auto c0 = train_cql_discrete(base, cql, 3).policy, c1 = train_cql_discrete(scaled, cql, 3).policy;
    for (int s = 0; s < 2; ++s) {
      CHECK(greedy_index(b0, s) == greedy_index(b1, s));
      CHECK(greedy_index(c0, s) == greedy_index(c1, s));
    }
  }
}

TEST_CASE("TD3-BC held-out critic loss, relative to target variance, trends down") {
  const auto& ds = glucose_dataset();
  std::vector<Transition> train(ds.transitions.begin(), ds.transitions.begin() + 16000);
  std::vector<Transition> held(ds.transitions.begin() + 16000, ds.transitions.end());
  auto config = small_td3bc(5000);
  config.reward_scale = 10.0;
  config.actor_lr = config.critic_lr = 3e-4;
  config.checkpoint_every = 250;
  const auto holdout = make_dataset(held);
  const auto result = train_td3bc(make_dataset(train), config, 2, &holdout);
  REQUIRE(result.holdout_losses.size() == 20);
  const auto& h = result.holdout_relative_losses;
  REQUIRE(h.size() == 20);
  for (double v : h) REQUIRE(std::isfinite(v));
  // 10-checkpoint moving average
  std::vector<double> smooth;
  for (std::size_t i = 0; i + 10 <= h.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = i; k < i + 10; ++k) sum += h[k];
    smooth.push_back(sum / 10.0);
  }
  for (std::size_t i = 1; i < smooth.size(); ++i) CHECK(smooth[i] < smooth[i - 1]);
}
