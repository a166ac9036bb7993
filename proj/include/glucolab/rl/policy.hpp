#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "glucolab/data/dataset.hpp"
#include "glucolab/env/controller.hpp"
#include "glucolab/nn/network.hpp"
#include "glucolab/rl/action_map.hpp"

namespace glucolab::rl {

enum class PolicyKind { continuous, discrete };

/// A trained, deterministic basal policy.
///
/// Continuous policies hold a tanh-bounded actor. Discrete policies hold a
/// Q-network over action bins and, for BCQ, a behavior network whose softmax
/// gates which bins may be chosen.
struct Policy {
  PolicyKind kind = PolicyKind::continuous;
  std::string algorithm;  // "td3bc", "bcq", "cql"
  NormalizationStats stats;
  nn::Network network;                   // actor or Q-network
  std::optional<nn::Network> behavior;   // BCQ imitation logits
  double bc_threshold = 0.0;             // BCQ likelihood-ratio threshold
  double reward_scale = 1.0;             // training rewards were divided by this
  DiscreteActionMap action_map{16};
};

/// Normalized basal action in [-1, 1]. Discrete policies return bin centers.
double act(const Policy& policy, const FeatureVector& features);

/// Greedy bin of a discrete policy.
std::size_t select_bin(const Policy& policy, const FeatureVector& features);

/// Bins allowed by the BCQ rule p(b)/max p >= threshold; all bins otherwise.
std::vector<bool> allowed_bins(const Eigen::VectorXd& behavior_logits, double threshold);

void save_policy(const std::filesystem::path& path, const Policy& policy);
Policy load_policy(const std::filesystem::path& path);

class PolicyController final : public Controller {
 public:
  explicit PolicyController(const Policy& policy) : policy_(policy) {}
  void reset() override {}
  double act(const GlucoseEnv& env) override;

 private:
  const Policy& policy_;
};

}  // namespace glucolab::rl
