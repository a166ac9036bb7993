#include "glucolab/rl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glucolab/nn/loss.hpp"
#include "glucolab/nn/serialize.hpp"
#include "glucolab/util/errors.hpp"
#include "glucolab/util/keyvalue.hpp"

namespace glucolab::rl {

namespace {

Eigen::VectorXd standardized_column(const Policy& policy, const FeatureVector& features) {
  const auto z = policy.stats.standardize(features);
  return Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
}

std::string join(const FeatureVector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

FeatureVector split(const std::string& text) {
  const auto items = split_list(text);
  if (items.size() != kFeatureDim) throw FormatError("policy: wrong normalization vector length");
  FeatureVector out{};
  for (std::size_t i = 0; i < kFeatureDim; ++i) out[i] = std::stod(items[i]);
  return out;
}

}  // namespace

std::vector<bool> allowed_bins(const Eigen::VectorXd& behavior_logits, double threshold) {
  const Eigen::VectorXd probs = nn::softmax_columns(behavior_logits);
  const double peak = probs.maxCoeff();
  std::vector<bool> allowed(static_cast<std::size_t>(probs.size()));
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    allowed[static_cast<std::size_t>(i)] = probs(i) / peak >= threshold;
  }
  return allowed;
}

std::size_t select_bin(const Policy& policy, const FeatureVector& features) {
  if (policy.kind != PolicyKind::discrete) throw Error("select_bin: policy is continuous");
  const Eigen::VectorXd x = standardized_column(policy, features);
  const Eigen::VectorXd q = policy.network.forward(x);
  std::vector<bool> allowed(static_cast<std::size_t>(q.size()), true);
  if (policy.behavior) allowed = allowed_bins(policy.behavior->forward(x), policy.bc_threshold);
  std::size_t best = 0;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < allowed.size(); ++b) {
    const double value = q(static_cast<Eigen::Index>(b));
    if (allowed[b] && value > best_q) {
      best_q = value;
      best = b;
    }
  }
  return best;
}

double act(const Policy& policy, const FeatureVector& features) {
  if (policy.kind == PolicyKind::discrete) {
    return policy.action_map.center(select_bin(policy, features));
  }
  const Eigen::VectorXd out = policy.network.forward(standardized_column(policy, features));
  if (!std::isfinite(out(0))) throw NumericalError("policy: non-finite action");
  return std::clamp(out(0), -1.0, 1.0);
}

double PolicyController::act(const GlucoseEnv& env) { return rl::act(policy_, env.observation()); }

void save_policy(const std::filesystem::path& path, const Policy& policy) {
  nn::WeightFile file;
  file.header.emplace_back("policy_kind", policy.kind == PolicyKind::continuous ? "continuous" : "discrete");
  file.header.emplace_back("algorithm", policy.algorithm);
  file.header.emplace_back("feature_mean", join(policy.stats.mean));
  file.header.emplace_back("feature_sd", join(policy.stats.sd));
  file.header.emplace_back("action_bins", std::to_string(policy.action_map.size()));
  file.header.emplace_back("bc_threshold", format_double(policy.bc_threshold));
  file.header.emplace_back("reward_scale", format_double(policy.reward_scale));
  file.networks.emplace_back("main", policy.network);
  if (policy.behavior) file.networks.emplace_back("behavior", *policy.behavior);
  nn::save_weight_file(path, file);
}

Policy load_policy(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError("policy file not found: '" + path.string() + "'");
  }
  const auto file = nn::load_weight_file(path);
  Policy p;
  const auto& kind = file.header_value("policy_kind");
  if (kind == "continuous") {
    p.kind = PolicyKind::continuous;
  } else if (kind == "discrete") {
    p.kind = PolicyKind::discrete;
  } else {
    throw FormatError("policy: unknown kind '" + kind + "'");
  }
  p.algorithm = file.header_value("algorithm");
  p.stats.mean = split(file.header_value("feature_mean"));
  p.stats.sd = split(file.header_value("feature_sd"));
  p.action_map = DiscreteActionMap(std::stoul(file.header_value("action_bins")));
  p.bc_threshold = std::stod(file.header_value("bc_threshold"));
  p.reward_scale = std::stod(file.header_value("reward_scale"));
  p.network = file.network("main");
  for (const auto& [name, net] : file.networks) {
    if (name == "behavior") p.behavior = net;
  }
  return p;
}

}  // namespace glucolab::rl
