#pragma once

#include <vector>

#include "glucolab/nn/network.hpp"
#include "glucolab/rl/action_map.hpp"
#include "glucolab/rl/replay.hpp"

namespace glucolab::rl::detail {

inline std::vector<Eigen::Index> action_bins(const Batch& b, const DiscreteActionMap& map) {
  std::vector<Eigen::Index> bins(static_cast<std::size_t>(b.actions.size()));
  for (Eigen::Index j = 0; j < b.actions.size(); ++j) {
    bins[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(map.bin_of(b.actions(j)));
  }
  return bins;
}

/// q(bins[j], j) for every column.
inline Eigen::RowVectorXd gather(const nn::Matrix& q, const std::vector<Eigen::Index>& bins) {
  Eigen::RowVectorXd out(q.cols());
  for (Eigen::Index j = 0; j < q.cols(); ++j) out(j) = q(bins[static_cast<std::size_t>(j)], j);
  return out;
}

/// Scatters a per-column gradient into the chosen rows of a zero matrix.
inline nn::Matrix scatter(const Eigen::RowVectorXd& grad, const std::vector<Eigen::Index>& bins,
                          Eigen::Index rows) {
  nn::Matrix out = nn::Matrix::Zero(rows, grad.size());
  for (Eigen::Index j = 0; j < grad.size(); ++j) out(bins[static_cast<std::size_t>(j)], j) = grad(j);
  return out;
}

}  // namespace glucolab::rl::detail
