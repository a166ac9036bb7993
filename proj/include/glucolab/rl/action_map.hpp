#pragma once

#include <cstddef>
#include <vector>

namespace glucolab::rl {

/// Equal-width bins partitioning the normalized action range [-1, 1].
class DiscreteActionMap {
 public:
  explicit DiscreteActionMap(std::size_t n_bins = 16);

  std::size_t size() const { return n_bins_; }
  /// n_bins + 1 monotone edges from -1 to 1.
  std::vector<double> edges() const;
  double center(std::size_t bin) const;
  /// Bin containing `action`; the upper edge 1 belongs to the last bin.
  std::size_t bin_of(double action) const;

 private:
  std::size_t n_bins_;
};

}  // namespace glucolab::rl
