#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "selectnet/rng.hpp"

namespace selectnet {

/// A batch of points, one column per point.
using Points = Eigen::MatrixXd;

enum class Activation { sine, relu, cubic_relu, sigmoid, tanh };

double activate(Activation kind, double x);
/// Exact first derivative; cubic_relu and relu use 0 at the kink.
double activate_derivative(Activation kind, double x);
std::string_view to_string(Activation kind);
Activation parse_activation(std::string_view name);

struct NetworkShape {
  std::size_t input_dim = 0;
  std::size_t width = 0;
  std::size_t depth = 0;
  std::size_t output_dim = 1;

  void validate() const;
  bool operator==(const NetworkShape&) const = default;
};

/// Weights W^0..W^L and biases b^0..b^L of a feedforward network, or any
/// collection congruent to one (gradients, optimizer moments).
struct ParameterSet {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static ParameterSet zeros(const NetworkShape& shape);
  static ParameterSet zeros_like(const ParameterSet& other);

  std::size_t size() const;
  bool congruent_with(const ParameterSet& other) const;
  bool matches(const NetworkShape& shape) const;

  /// Flat addressing in layer order, weights before bias, column-major.
  double& at(std::size_t index);
  double at(std::size_t index) const;
  Eigen::VectorXd flatten() const;

  ParameterSet& operator+=(const ParameterSet& other);
  ParameterSet& operator*=(double factor);
  void axpy(double alpha, const ParameterSet& other);
  double max_abs() const;
  bool all_finite() const;
};

/// Feedforward network x^{l+1} = sigma(W^l x^l + b^l), output W^L x^L + b^L.
class MlpNetwork {
 public:
  MlpNetwork(NetworkShape shape, Activation activation, ParameterSet params);

  static MlpNetwork zeros(NetworkShape shape, Activation activation);

  const NetworkShape& shape() const { return shape_; }
  Activation activation() const { return activation_; }
  const ParameterSet& parameters() const { return params_; }
  ParameterSet& parameters() { return params_; }

  /// Scalar output at every column of `points`.
  Eigen::VectorXd forward(const Points& points) const;

 private:
  NetworkShape shape_;
  Activation activation_;
  ParameterSet params_;
};

/// Zero biases, weights i.i.d. N(0, 2/(fan_in+fan_out)).
MlpNetwork init_network(const NetworkShape& shape, Activation activation, RngStream& rng);
MlpNetwork init_network(const NetworkShape& shape, Activation activation, std::uint64_t seed);

/// Bounded weight function (M0-m0)*sigmoid(core(x)) + m0, kept strictly
/// inside (m0, M0) even where the sigmoid saturates in floating point.
class SelectionNetwork {
 public:
  SelectionNetwork(MlpNetwork core, double lower, double upper);

  const MlpNetwork& core() const { return core_; }
  MlpNetwork& core() { return core_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  Eigen::VectorXd forward(const Points& points) const;
  /// Map raw core outputs to selection values.
  Eigen::VectorXd from_core(const Eigen::VectorXd& core_values) const;
  /// d(selection)/d(core) at the given raw core outputs.
  Eigen::VectorXd core_sensitivity(const Eigen::VectorXd& core_values) const;

 private:
  MlpNetwork core_;
  double lower_;
  double upper_;
};

double sigmoid(double x);

enum class Mask { none, ball, cube };

std::string_view to_string(Mask mask);
Mask parse_mask(std::string_view name);

/// Solution u(x) = h(x) * core(x) with h chosen to vanish on the boundary.
class SolutionAnsatz {
 public:
  SolutionAnsatz(MlpNetwork core, Mask mask);

  const MlpNetwork& core() const { return core_; }
  MlpNetwork& core() { return core_; }
  Mask mask() const { return mask_; }

  Eigen::VectorXd forward(const Points& points) const;
  /// h(x) per column; all ones for Mask::none.
  Eigen::VectorXd mask_values(const Points& points) const;

 private:
  MlpNetwork core_;
  Mask mask_;
};

}  // namespace selectnet
