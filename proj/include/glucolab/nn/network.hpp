#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>
#include <vector>

#include "glucolab/util/random.hpp"

namespace glucolab::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { relu, tanh, identity };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view text);

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::identity;
};

/// Per-parameter partials with the same shapes as a Network.
struct Gradient {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;

  Gradient& operator+=(const Gradient& other);
  Gradient& operator*=(double factor);
  bool all_finite() const;
};

/// Intermediate values kept by a forward pass for the backward pass.
/// values[0] is the input; values[l + 1] is the output of layer l.
struct Tape {
  std::vector<Matrix> values;
};

/// Dense feedforward network. Batches are column-major: one sample per
/// column, so inputs are (input_dim x batch).
class Network {
 public:
  Network() = default;

  /// He-uniform init for relu layers, Xavier-uniform otherwise; biases zero.
  Network(const std::vector<std::size_t>& layer_sizes, const std::vector<Activation>& activations,
          Rng& rng);

  /// All weights and biases zero.
  static Network zeros(const std::vector<std::size_t>& layer_sizes,
                       const std::vector<Activation>& activations);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::vector<std::size_t> layer_sizes() const;
  std::vector<Activation> activations() const;
  std::size_t parameter_count() const;

  Matrix forward(const Matrix& input) const;
  Matrix forward(const Matrix& input, Tape& tape) const;

  /// Reverse-mode pass. Given dL/d(output), accumulates parameter partials
  /// into `grad` (when non-null, shaped by zero_gradient()) and returns
  /// dL/d(input), which lets losses flow through one network into another.
  Matrix backward(const Tape& tape, const Matrix& output_grad, Gradient* grad) const;

  Gradient zero_gradient() const;

  /// Parameters flattened layer by layer (weights column-major, then bias).
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  bool all_finite() const;
  bool operator==(const Network& other) const;

 private:
  std::vector<DenseLayer> layers_;
};

/// target <- (1 - tau) * target + tau * online, elementwise.
void polyak_update(Network& target, const Network& online, double tau);

}  // namespace glucolab::nn
