#pragma once

#include "glucolab/nn/network.hpp"

namespace glucolab::nn {

struct LossResult {
  double value = 0.0;
  Matrix grad;  // dL/d(prediction)
};

/// Mean over all entries of (prediction - target)^2.
LossResult mse_loss(const Matrix& prediction, const Matrix& target);

/// Mean Huber loss with threshold delta (smooth L1 when delta = 1).
LossResult huber_loss(const Matrix& prediction, const Matrix& target, double delta = 1.0);

/// Column-wise log-sum-exp, computed with the max shifted out.
Eigen::RowVectorXd logsumexp_columns(const Matrix& logits);

/// Column-wise softmax.
Matrix softmax_columns(const Matrix& logits);

}  // namespace glucolab::nn
