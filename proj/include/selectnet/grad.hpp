#pragma once

#include <Eigen/Dense>

#include <vector>

#include "selectnet/net.hpp"

namespace selectnet {

using ParameterGradient = ParameterSet;

/// Layer values kept from one batched forward pass.
struct ForwardCache {
  /// x^0 (the input batch) through x^L.
  std::vector<Eigen::MatrixXd> activations;
  /// W^l x^l + b^l for l = 0..L-1.
  std::vector<Eigen::MatrixXd> preactivations;

  std::size_t layer_count() const { return activations.size(); }
  Eigen::Index batch_size() const { return activations.empty() ? 0 : activations.front().cols(); }
};

struct CachedForward {
  Eigen::VectorXd values;
  ForwardCache cache;
};

CachedForward forward_with_cache(const MlpNetwork& net, const Points& points);

/// Output layer recomputed from the cached last hidden layer.
Eigen::VectorXd replay_output(const MlpNetwork& net, const ForwardCache& cache);

/// Gradient of sum_i upstream[i] * net(x_i) with respect to all parameters.
ParameterGradient backprop_params(const MlpNetwork& net, const ForwardCache& cache,
                                  const Eigen::VectorXd& upstream);

}  // namespace selectnet
