#include "selectnet/grad.hpp"

#include <stdexcept>

#include "propagate.hpp"

namespace selectnet {

namespace {

Eigen::MatrixXd activation_slope(Activation kind, const Eigen::MatrixXd& z) {
  switch (kind) {
    case Activation::sine:
      return z.array().cos().matrix();
    case Activation::relu:
      return (z.array() > 0.0).cast<double>().matrix();
    case Activation::cubic_relu:
      return (3.0 * z.array().max(0.0).square()).matrix();
    default:
      return z.unaryExpr([kind](double v) { return activate_derivative(kind, v); });
  }
}

}  // namespace

CachedForward forward_with_cache(const MlpNetwork& net, const Points& points) {
  if (static_cast<std::size_t>(points.rows()) != net.shape().input_dim)
    throw std::invalid_argument("forward_with_cache: point dimension does not match input_dim");
  CachedForward result;
  result.values = detail::propagate(net, points, &result.cache);
  return result;
}

Eigen::VectorXd replay_output(const MlpNetwork& net, const ForwardCache& cache) {
  const auto& p = net.parameters();
  const std::size_t depth = net.shape().depth;
  if (cache.layer_count() != depth + 1) throw std::invalid_argument("replay_output: cache does not match network");
  const auto& x = cache.activations.back();
  Eigen::RowVectorXd out(x.cols());
  out.noalias() = p.weights[depth] * x;
  out.array() += p.biases[depth](0);
  return out.transpose();
}

ParameterGradient backprop_params(const MlpNetwork& net, const ForwardCache& cache, const Eigen::VectorXd& upstream) {
  const std::size_t depth = net.shape().depth;
  if (cache.layer_count() != depth + 1 || cache.preactivations.size() != depth)
    throw std::invalid_argument("backprop_params: cache does not match network depth");
  if (upstream.size() != cache.batch_size())
    throw std::invalid_argument("backprop_params: upstream length does not match the cached batch");
  if (static_cast<std::size_t>(cache.activations.front().rows()) != net.shape().input_dim ||
      cache.activations.back().rows() != net.parameters().weights[depth].cols())
    throw std::invalid_argument("backprop_params: cache does not match network widths");

  const auto& p = net.parameters();
  auto grad = ParameterSet::zeros_like(p);

  // delta holds dLoss/d(pre-activation) of the current layer, one column per point.
  Eigen::MatrixXd delta = upstream.transpose();
  grad.weights[depth].noalias() = delta * cache.activations[depth].transpose();
  grad.biases[depth](0) = upstream.sum();

  for (std::size_t l = depth; l-- > 0;) {
    Eigen::MatrixXd back(p.weights[l + 1].cols(), delta.cols());
    back.noalias() = p.weights[l + 1].transpose() * delta;
    delta = back.cwiseProduct(activation_slope(net.activation(), cache.preactivations[l]));
    grad.weights[l].noalias() = delta * cache.activations[l].transpose();
    grad.biases[l] = delta.rowwise().sum();
  }
  return grad;
}

}  // namespace selectnet
