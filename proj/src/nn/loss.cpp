#include "glucolab/nn/loss.hpp"

#include "glucolab/util/errors.hpp"

namespace glucolab::nn {

namespace {
void check_same(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("loss: shape mismatch");
}
}  // namespace

LossResult mse_loss(const Matrix& prediction, const Matrix& target) {
  check_same(prediction, target);
  const double n = static_cast<double>(prediction.size());
  const Matrix diff = prediction - target;
  return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

LossResult huber_loss(const Matrix& prediction, const Matrix& target, double delta) {
  check_same(prediction, target);
  const double n = static_cast<double>(prediction.size());
  const Matrix diff = prediction - target;
  LossResult r;
  r.grad.resize(diff.rows(), diff.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < diff.size(); ++i) {
    const double d = diff(i);
    const double a = std::abs(d);
    if (a <= delta) {
      total += 0.5 * d * d;
      r.grad(i) = d / n;
    } else {
      total += delta * (a - 0.5 * delta);
      r.grad(i) = (d > 0 ? delta : -delta) / n;
    }
  }
  r.value = total / n;
  return r;
}

Eigen::RowVectorXd logsumexp_columns(const Matrix& logits) {
  const Eigen::RowVectorXd peak = logits.colwise().maxCoeff();
  const Matrix shifted = logits.rowwise() - peak;
  return peak.array() + shifted.array().exp().colwise().sum().log();
}

Matrix softmax_columns(const Matrix& logits) {
  const Eigen::RowVectorXd peak = logits.colwise().maxCoeff();
  Matrix e = (logits.rowwise() - peak).array().exp();
  const Eigen::RowVectorXd sums = e.colwise().sum();
  return e.array().rowwise() / sums.array();
}

}  // namespace glucolab::nn
