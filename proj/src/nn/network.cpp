#include "glucolab/nn/network.hpp"

#include <cmath>
#include <string>

#include "glucolab/util/errors.hpp"

namespace glucolab::nn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
  }
  return "identity";
}

Activation parse_activation(std::string_view text) {
  if (text == "relu") return Activation::relu;
  if (text == "tanh") return Activation::tanh;
  if (text == "identity") return Activation::identity;
  throw FormatError("unknown activation '" + std::string(text) + "'");
}

Gradient& Gradient::operator+=(const Gradient& other) {
  if (weight.size() != other.weight.size()) throw Error("gradient: shape mismatch");
  for (std::size_t l = 0; l < weight.size(); ++l) {
    weight[l] += other.weight[l];
    bias[l] += other.bias[l];
  }
  return *this;
}

Gradient& Gradient::operator*=(double factor) {
  for (std::size_t l = 0; l < weight.size(); ++l) {
    weight[l] *= factor;
    bias[l] *= factor;
  }
  return *this;
}

bool Gradient::all_finite() const {
  for (std::size_t l = 0; l < weight.size(); ++l) {
    if (!weight[l].allFinite() || !bias[l].allFinite()) return false;
  }
  return true;
}

namespace {

void check_shape(const std::vector<std::size_t>& sizes, const std::vector<Activation>& acts) {
  if (sizes.size() < 2) throw Error("network: need at least input and output sizes");
  if (acts.size() != sizes.size() - 1) throw Error("network: one activation per layer required");
  for (auto s : sizes) {
    if (s == 0) throw Error("network: zero-width layer");
  }
}

void apply_activation(Matrix& m, Activation a) {
  switch (a) {
    case Activation::relu: m = m.cwiseMax(0.0); break;
    case Activation::tanh: m = m.array().tanh().matrix(); break;
    case Activation::identity: break;
  }
}

}  // namespace

Network::Network(const std::vector<std::size_t>& sizes, const std::vector<Activation>& acts, Rng& rng) {
  check_shape(sizes, acts);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    const double limit = acts[l] == Activation::relu
                             ? std::sqrt(6.0 / static_cast<double>(in))
                             : std::sqrt(6.0 / static_cast<double>(in + out));
    DenseLayer layer;
    layer.weight.resize(out, in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index c = 0; c < in; ++c) {
      for (Eigen::Index r = 0; r < out; ++r) layer.weight(r, c) = dist(rng);
    }
    layer.bias = Vector::Zero(out);
    layer.activation = acts[l];
    layers_.push_back(std::move(layer));
  }
}

Network Network::zeros(const std::vector<std::size_t>& sizes, const std::vector<Activation>& acts) {
  check_shape(sizes, acts);
  Network net;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(sizes[l]);
    const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
    net.layers_.push_back({Matrix::Zero(out, in), Vector::Zero(out), acts[l]});
  }
  return net;
}

std::size_t Network::input_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t Network::output_dim() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
}

std::vector<std::size_t> Network::layer_sizes() const {
  std::vector<std::size_t> sizes;
  if (layers_.empty()) return sizes;
  sizes.push_back(input_dim());
  for (const auto& l : layers_) sizes.push_back(static_cast<std::size_t>(l.weight.rows()));
  return sizes;
}

std::vector<Activation> Network::activations() const {
  std::vector<Activation> out;
  for (const auto& l : layers_) out.push_back(l.activation);
  return out;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Matrix Network::forward(const Matrix& input) const {
  if (static_cast<std::size_t>(input.rows()) != input_dim()) {
    throw Error("network: input has " + std::to_string(input.rows()) + " rows, expected " +
                std::to_string(input_dim()));
  }
  Matrix x = input;
  for (const auto& l : layers_) {
    Matrix z = l.weight * x;
    z.colwise() += l.bias;
    apply_activation(z, l.activation);
    x = std::move(z);
  }
  return x;
}

Matrix Network::forward(const Matrix& input, Tape& tape) const {
  if (static_cast<std::size_t>(input.rows()) != input_dim()) {
    throw Error("network: input has " + std::to_string(input.rows()) + " rows, expected " +
                std::to_string(input_dim()));
  }
  tape.values.resize(layers_.size() + 1);
  tape.values[0] = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix& z = tape.values[l + 1];
    z.noalias() = layers_[l].weight * tape.values[l];
    z.colwise() += layers_[l].bias;
    apply_activation(z, layers_[l].activation);
  }
  return tape.values.back();
}

Matrix Network::backward(const Tape& tape, const Matrix& output_grad, Gradient* grad) const {
  if (tape.values.size() != layers_.size() + 1) throw Error("network: tape does not match network");
  if (output_grad.rows() != tape.values.back().rows() ||
      output_grad.cols() != tape.values.back().cols()) {
    throw Error("network: output gradient shape mismatch");
  }
  Matrix delta = output_grad;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto& layer = layers_[i];
    const Matrix& out = tape.values[i + 1];
    switch (layer.activation) {
      case Activation::relu: delta = (out.array() > 0.0).select(delta, 0.0); break;
      case Activation::tanh: delta = delta.cwiseProduct((1.0 - out.array().square()).matrix()); break;
      case Activation::identity: break;
    }
    if (grad) {
      grad->weight[i].noalias() += delta * tape.values[i].transpose();
      grad->bias[i].noalias() += delta.rowwise().sum();
    }
    Matrix upstream = layer.weight.transpose() * delta;
    delta = std::move(upstream);
  }
  return delta;
}

Gradient Network::zero_gradient() const {
  Gradient g;
  for (const auto& l : layers_) {
    g.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Vector::Zero(l.bias.size()));
  }
  return g;
}

std::vector<double> Network::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

void Network::unflatten(const std::vector<double>& params) {
  if (params.size() != parameter_count()) throw Error("network: parameter count mismatch");
  auto it = params.begin();
  for (auto& l : layers_) {
    std::copy(it, it + l.weight.size(), l.weight.data());
    it += l.weight.size();
    std::copy(it, it + l.bias.size(), l.bias.data());
    it += l.bias.size();
  }
}

bool Network::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

bool Network::operator==(const Network& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.activation != b.activation || a.weight.rows() != b.weight.rows() ||
        a.weight.cols() != b.weight.cols() || a.weight != b.weight || a.bias != b.bias) {
      return false;
    }
  }
  return true;
}

void polyak_update(Network& target, const Network& online, double tau) {
  auto& t = target.layers();
  const auto& o = online.layers();
  if (t.size() != o.size()) throw Error("polyak_update: architecture mismatch");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].weight.rows() != o[i].weight.rows() || t[i].weight.cols() != o[i].weight.cols()) {
      throw Error("polyak_update: architecture mismatch");
    }
    if (tau == 1.0) {
      t[i].weight = o[i].weight;
      t[i].bias = o[i].bias;
    } else if (tau != 0.0) {
      t[i].weight = (1.0 - tau) * t[i].weight + tau * o[i].weight;
      t[i].bias = (1.0 - tau) * t[i].bias + tau * o[i].bias;
    }
  }
}

}  // namespace glucolab::nn
