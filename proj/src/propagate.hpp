#pragma once

#include "selectnet/grad.hpp"

namespace selectnet::detail {

inline void apply_activation(Activation kind, Eigen::MatrixXd& z) {
  switch (kind) {
    case Activation::sine:
      z = z.array().sin().matrix();
      return;
    case Activation::relu:
      z = z.array().max(0.0).matrix();
      return;
    case Activation::cubic_relu:
      z = (z.array().max(0.0).cube()).matrix();
      return;
    case Activation::sigmoid:
      z = z.unaryExpr([](double v) { return sigmoid(v); });
      return;
    case Activation::tanh:
      z = z.array().tanh().matrix();
      return;
  }
}

/// Shared layer loop for forward() and forward_with_cache(); keeping a single
/// code path makes the two bitwise identical.
inline Eigen::VectorXd propagate(const MlpNetwork& net, const Points& points, ForwardCache* cache) {
  const auto& p = net.parameters();
  const std::size_t depth = net.shape().depth;
  if (cache) {
    cache->activations.clear();
    cache->preactivations.clear();
    cache->activations.reserve(depth + 1);
    cache->preactivations.reserve(depth);
    cache->activations.push_back(points);
  }
  Eigen::MatrixXd x = points;
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z(p.weights[l].rows(), x.cols());
    z.noalias() = p.weights[l] * x;
    z.colwise() += p.biases[l];
    if (cache) cache->preactivations.push_back(z);
    apply_activation(net.activation(), z);
    x = std::move(z);
    if (cache) cache->activations.push_back(x);
  }
  Eigen::RowVectorXd out(x.cols());
  out.noalias() = p.weights[depth] * x;
  out.array() += p.biases[depth](0);
  return out.transpose();
}

}  // namespace selectnet::detail
