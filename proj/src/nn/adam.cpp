#include "glucolab/nn/adam.hpp"

#include <cmath>

#include "glucolab/util/errors.hpp"

namespace glucolab::nn {

AdamState AdamState::for_network(const Network& net, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.first_moment = net.zero_gradient();
  s.second_moment = net.zero_gradient();
  return s;
}

namespace {

template <typename Param, typename Moment>
void update(Param& w, Moment& m, Moment& v, const Moment& g, const AdamConfig& c, double correction1,
            double correction2) {
  m = c.beta1 * m + (1.0 - c.beta1) * g;
  v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
  w.array() -= c.alpha * (m.array() / correction1) / ((v.array() / correction2).sqrt() + c.epsilon);
}

}  // namespace

void adam_step(Network& net, AdamState& state, const Gradient& grad) {
  auto& layers = net.layers();
  if (grad.weight.size() != layers.size() || state.first_moment.weight.size() != layers.size()) {
    throw Error("adam_step: shape mismatch");
  }
  if (!grad.all_finite()) throw NumericalError("adam_step: non-finite gradient");
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.config.beta1, t);
  const double correction2 = 1.0 - std::pow(state.config.beta2, t);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, state.first_moment.weight[l], state.second_moment.weight[l],
           grad.weight[l], state.config, correction1, correction2);
    update(layers[l].bias, state.first_moment.bias[l], state.second_moment.bias[l], grad.bias[l],
           state.config, correction1, correction2);
  }
}

}  // namespace glucolab::nn
