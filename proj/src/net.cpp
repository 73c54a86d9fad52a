#include "selectnet/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "propagate.hpp"

namespace selectnet {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::sine:
      return std::sin(x);
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::cubic_relu:
      return x > 0.0 ? x * x * x : 0.0;
    case Activation::sigmoid:
      return sigmoid(x);
    case Activation::tanh:
      return std::tanh(x);
  }
  return 0.0;
}

double activate_derivative(Activation kind, double x) {
  switch (kind) {
    case Activation::sine:
      return std::cos(x);
    case Activation::relu:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::cubic_relu:
      return x > 0.0 ? 3.0 * x * x : 0.0;
    case Activation::sigmoid: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
  }
  return 0.0;
}

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::sine:
      return "sine";
    case Activation::relu:
      return "relu";
    case Activation::cubic_relu:
      return "cubic_relu";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::tanh:
      return "tanh";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "sine" || name == "sin") return Activation::sine;
  if (name == "relu") return Activation::relu;
  if (name == "cubic_relu" || name == "relu3") return Activation::cubic_relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

void NetworkShape::validate() const {
  if (input_dim == 0) throw std::invalid_argument("NetworkShape: input_dim must be >= 1");
  if (width == 0) throw std::invalid_argument("NetworkShape: width must be >= 1");
  if (depth == 0) throw std::invalid_argument("NetworkShape: depth must be >= 1");
  if (output_dim != 1) throw std::invalid_argument("NetworkShape: only scalar outputs are supported");
}

// ---------------------------------------------------------------------------
// ParameterSet

ParameterSet ParameterSet::zeros(const NetworkShape& shape) {
  shape.validate();
  ParameterSet p;
  p.weights.reserve(shape.depth + 1);
  p.biases.reserve(shape.depth + 1);
  std::size_t fan_in = shape.input_dim;
  for (std::size_t l = 0; l < shape.depth; ++l) {
    p.weights.push_back(Eigen::MatrixXd::Zero(shape.width, fan_in));
    p.biases.push_back(Eigen::VectorXd::Zero(shape.width));
    fan_in = shape.width;
  }
  p.weights.push_back(Eigen::MatrixXd::Zero(shape.output_dim, shape.width));
  p.biases.push_back(Eigen::VectorXd::Zero(shape.output_dim));
  return p;
}

ParameterSet ParameterSet::zeros_like(const ParameterSet& other) {
  ParameterSet p;
  for (const auto& w : other.weights) p.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : other.biases) p.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return p;
}

std::size_t ParameterSet::size() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

bool ParameterSet::congruent_with(const ParameterSet& other) const {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() || weights[l].cols() != other.weights[l].cols()) return false;
    if (biases[l].size() != other.biases[l].size()) return false;
  }
  return true;
}

bool ParameterSet::matches(const NetworkShape& shape) const {
  return congruent_with(zeros(shape));
}

double& ParameterSet::at(std::size_t index) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const auto nw = static_cast<std::size_t>(weights[l].size());
    if (index < nw) return weights[l].data()[index];
    index -= nw;
    const auto nb = static_cast<std::size_t>(biases[l].size());
    if (index < nb) return biases[l].data()[index];
    index -= nb;
  }
  throw std::out_of_range("ParameterSet::at: index past the last parameter");
}

double ParameterSet::at(std::size_t index) const { return const_cast<ParameterSet*>(this)->at(index); }

Eigen::VectorXd ParameterSet::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(size()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.segment(k, weights[l].size()) = Eigen::Map<const Eigen::VectorXd>(weights[l].data(), weights[l].size());
    k += weights[l].size();
    flat.segment(k, biases[l].size()) = biases[l];
    k += biases[l].size();
  }
  return flat;
}

ParameterSet& ParameterSet::operator+=(const ParameterSet& other) {
  axpy(1.0, other);
  return *this;
}

ParameterSet& ParameterSet::operator*=(double factor) {
  for (auto& w : weights) w *= factor;
  for (auto& b : biases) b *= factor;
  return *this;
}

void ParameterSet::axpy(double alpha, const ParameterSet& other) {
  if (!congruent_with(other)) throw std::invalid_argument("ParameterSet::axpy: shape mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += alpha * other.weights[l];
    biases[l] += alpha * other.biases[l];
  }
}

double ParameterSet::max_abs() const {
  double m = 0.0;
  for (const auto& w : weights)
    if (w.size() > 0) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : biases)
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

bool ParameterSet::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// MlpNetwork

MlpNetwork::MlpNetwork(NetworkShape shape, Activation activation, ParameterSet params)
    : shape_(shape), activation_(activation), params_(std::move(params)) {
  shape_.validate();
  if (!params_.matches(shape_)) throw std::invalid_argument("MlpNetwork: parameters do not match the network shape");
}

MlpNetwork MlpNetwork::zeros(NetworkShape shape, Activation activation) {
  return MlpNetwork(shape, activation, ParameterSet::zeros(shape));
}

Eigen::VectorXd MlpNetwork::forward(const Points& points) const {
  if (static_cast<std::size_t>(points.rows()) != shape_.input_dim)
    throw std::invalid_argument("MlpNetwork::forward: point dimension " + std::to_string(points.rows()) +
                                " does not match input_dim " + std::to_string(shape_.input_dim));
  return detail::propagate(*this, points, nullptr);
}

MlpNetwork init_network(const NetworkShape& shape, Activation activation, RngStream& rng) {
  auto params = ParameterSet::zeros(shape);
  for (auto& w : params.weights) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = stddev * rng.normal();
  }
  return MlpNetwork(shape, activation, std::move(params));
}

MlpNetwork init_network(const NetworkShape& shape, Activation activation, std::uint64_t seed) {
  RngStream rng(seed, StreamTag::init_solution);
  return init_network(shape, activation, rng);
}

// ---------------------------------------------------------------------------
// SelectionNetwork

SelectionNetwork::SelectionNetwork(MlpNetwork core, double lower, double upper)
    : core_(std::move(core)), lower_(lower), upper_(upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || lower < 0.0 || !(lower < upper))
    throw std::invalid_argument("SelectionNetwork: bounds must satisfy 0 <= m0 < M0");
}

Eigen::VectorXd SelectionNetwork::from_core(const Eigen::VectorXd& core_values) const {
  const double span = upper_ - lower_;
  const double top = std::nextafter(upper_, lower_);
  const double bottom = std::nextafter(lower_, upper_);
  return core_values.unaryExpr([&](double z) {
    const double v = span * sigmoid(z) + lower_;
    return std::clamp(v, bottom, top);
  });
}

Eigen::VectorXd SelectionNetwork::core_sensitivity(const Eigen::VectorXd& core_values) const {
  const double span = upper_ - lower_;
  return core_values.unaryExpr([&](double z) {
    const double s = sigmoid(z);
    return span * s * (1.0 - s);
  });
}

Eigen::VectorXd SelectionNetwork::forward(const Points& points) const { return from_core(core_.forward(points)); }

// ---------------------------------------------------------------------------
// SolutionAnsatz

std::string_view to_string(Mask mask) {
  switch (mask) {
    case Mask::none:
      return "none";
    case Mask::ball:
      return "ball";
    case Mask::cube:
      return "cube";
  }
  return "?";
}

Mask parse_mask(std::string_view name) {
  if (name == "none") return Mask::none;
  if (name == "ball") return Mask::ball;
  if (name == "cube") return Mask::cube;
  throw std::invalid_argument("unknown mask '" + std::string(name) + "'");
}

SolutionAnsatz::SolutionAnsatz(MlpNetwork core, Mask mask) : core_(std::move(core)), mask_(mask) {}

Eigen::VectorXd SolutionAnsatz::mask_values(const Points& points) const {
  switch (mask_) {
    case Mask::none:
      return Eigen::VectorXd::Ones(points.cols());
    case Mask::ball:
      return (points.colwise().squaredNorm().array() - 1.0).matrix().transpose();
    case Mask::cube: {
      Eigen::VectorXd h = Eigen::VectorXd::Ones(points.cols());
      for (Eigen::Index j = 0; j < points.cols(); ++j)
        for (Eigen::Index i = 0; i < points.rows(); ++i) h(j) *= points(i, j) * points(i, j) - 1.0;
      return h;
    }
  }
  return Eigen::VectorXd::Ones(points.cols());
}

Eigen::VectorXd SolutionAnsatz::forward(const Points& points) const {
  Eigen::VectorXd core_values = core_.forward(points);
  if (mask_ == Mask::none) return core_values;
  return core_values.cwiseProduct(mask_values(points));
}

}  // namespace selectnet
