#include "glucolab/rl/action_map.hpp"

#include <algorithm>
#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab::rl {

DiscreteActionMap::DiscreteActionMap(std::size_t n_bins) : n_bins_(n_bins) {
  if (n_bins_ < 2) throw ConfigError("action map: need at least 2 bins");
}

std::vector<double> DiscreteActionMap::edges() const {
  std::vector<double> e(n_bins_ + 1);
  for (std::size_t k = 0; k <= n_bins_; ++k) {
    e[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n_bins_);
  }
  return e;
}

double DiscreteActionMap::center(std::size_t bin) const {
  if (bin >= n_bins_) throw Error("action map: bin out of range");
  return -1.0 + (2.0 * static_cast<double>(bin) + 1.0) / static_cast<double>(n_bins_);
}

std::size_t DiscreteActionMap::bin_of(double action) const {
  const double scaled = (std::clamp(action, -1.0, 1.0) + 1.0) * 0.5 * static_cast<double>(n_bins_);
  return std::min(n_bins_ - 1, static_cast<std::size_t>(std::floor(scaled)));
}

}  // namespace glucolab::rl
