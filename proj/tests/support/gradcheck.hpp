#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "glucolab/nn/loss.hpp"
#include "glucolab/nn/network.hpp"

namespace oracle {

using glucolab::nn::Matrix;
using glucolab::nn::Network;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

/// Largest relative error between backprop and central differences of the
/// summed squared output, for every parameter and every input entry.
inline double max_gradient_error(const Network& net, const Matrix& input, const Matrix& target,
                                 double h = 1e-6) {
  const auto loss = [&](const Network& n, const Matrix& x) {
    return 0.5 * (n.forward(x) - target).squaredNorm();
  };
  glucolab::nn::Tape tape;
  const Matrix out = net.forward(input, tape);
  auto grad = net.zero_gradient();
  const Matrix input_grad = net.backward(tape, out - target, &grad);

  std::vector<double> analytic;
  for (std::size_t l = 0; l < grad.weight.size(); ++l) {
    for (Eigen::Index i = 0; i < grad.weight[l].size(); ++i) analytic.push_back(grad.weight[l].data()[i]);
    for (Eigen::Index i = 0; i < grad.bias[l].size(); ++i) analytic.push_back(grad.bias[l].data()[i]);
  }
  auto params = net.flatten();
  double worst = 0.0;
  Network probe = net;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + h;
    probe.unflatten(params);
    const double up = loss(probe, input);
    params[p] = saved - h;
    probe.unflatten(params);
    const double down = loss(probe, input);
    params[p] = saved;
    worst = std::max(worst, relative_error(analytic[p], (up - down) / (2 * h)));
  }
  Matrix x = input;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = loss(net, x);
    x.data()[i] = saved - h;
    const double down = loss(net, x);
    x.data()[i] = saved;
    worst = std::max(worst, relative_error(input_grad.data()[i], (up - down) / (2 * h)));
  }
  return worst;
}

}  // namespace oracle
