#include "selectnet/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace selectnet {

namespace {

void require_congruent(const ParameterSet& params, const ParameterSet& other, const char* what) {
  if (!params.congruent_with(other)) throw std::invalid_argument(std::string(what) + ": parameter shape mismatch");
}

using Flat = Eigen::Map<Eigen::VectorXd>;
using ConstFlat = Eigen::Map<const Eigen::VectorXd>;

Flat flat(Eigen::MatrixXd& m) { return Flat(m.data(), m.size()); }
Flat flat(Eigen::VectorXd& v) { return Flat(v.data(), v.size()); }

/// Calls fn(param, grad, state_a, state_b) once per weight matrix and bias vector.
template <typename Fn>
void for_each_block(ParameterSet& params, const ParameterSet& grad, ParameterSet& a, ParameterSet& b, Fn&& fn) {
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    fn(flat(params.weights[l]), ConstFlat(grad.weights[l].data(), grad.weights[l].size()), flat(a.weights[l]),
       flat(b.weights[l]));
    fn(flat(params.biases[l]), ConstFlat(grad.biases[l].data(), grad.biases[l].size()), flat(a.biases[l]),
       flat(b.biases[l]));
  }
}

}  // namespace

void ScheduleSpec::validate() const {
  if (total_iterations < 0) throw std::invalid_argument("ScheduleSpec: n must be >= 0");
  if (segments < 1) throw std::invalid_argument("ScheduleSpec: segments must be >= 1");
  if (floor_after < 0) throw std::invalid_argument("ScheduleSpec: floor_after must be >= 0");
  if (!(selection_rate > 0.0) || !(floor_rate > 0.0)) throw std::invalid_argument("ScheduleSpec: rates must be positive");
}

double lr_schedule(std::int64_t k, const ScheduleSpec& spec) {
  spec.validate();
  if (k < 1 || k > spec.total_iterations)
    throw std::out_of_range("lr_schedule: iteration " + std::to_string(k) + " outside [1, " +
                            std::to_string(spec.total_iterations) + "]");
  std::int64_t span = spec.total_iterations;
  if (spec.floor_after > 0) {
    if (k > spec.floor_after) return spec.floor_rate;
    span = spec.floor_after;
  }
  // j with j*span/segments < k <= (j+1)*span/segments, i.e. ceil(k*segments/span) - 1
  const std::int64_t j = (k * spec.segments + span - 1) / span - 1;
  const double exponent = spec.base_exponent + (spec.final_exponent - spec.base_exponent) * static_cast<double>(j) /
                                                   static_cast<double>(spec.segments);
  return std::pow(10.0, exponent);
}

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::adam ? "adam" : "adagrad"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adagrad") return OptimizerKind::adagrad;
  if (name == "adam") return OptimizerKind::adam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

AdaGradState AdaGradState::for_params(const ParameterSet& params, double delta) {
  return AdaGradState{ParameterSet::zeros_like(params), delta};
}

void adagrad_step(ParameterSet& params, const ParameterGradient& grad, AdaGradState& state, double rate,
                  Direction direction) {
  require_congruent(params, grad, "adagrad_step");
  require_congruent(params, state.accumulator, "adagrad_step");
  const double sign = direction == Direction::descend ? -1.0 : 1.0;
  for_each_block(params, grad, state.accumulator, state.accumulator, [&](Flat p, ConstFlat g, Flat acc, Flat) {
    acc.array() += g.array().square();
    p.array() += sign * rate * g.array() / (acc.array().sqrt() + state.delta);
  });
}

AdamState AdamState::for_params(const ParameterSet& params) {
  AdamState s;
  s.first = ParameterSet::zeros_like(params);
  s.second = ParameterSet::zeros_like(params);
  return s;
}

void adam_step(ParameterSet& params, const ParameterGradient& grad, AdamState& state, double rate,
               Direction direction) {
  require_congruent(params, grad, "adam_step");
  require_congruent(params, state.first, "adam_step");
  ++state.steps;
  const double sign = direction == Direction::descend ? -1.0 : 1.0;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.steps));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.steps));
  for_each_block(params, grad, state.first, state.second, [&](Flat p, ConstFlat g, Flat m, Flat v) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v.array() = state.beta2 * v.array() + (1.0 - state.beta2) * g.array().square();
    p.array() += sign * rate * (m.array() / c1) / ((v.array() / c2).sqrt() + state.delta);
  });
}

Optimizer::Optimizer(OptimizerKind kind, const ParameterSet& params) : kind_(kind) {
  if (kind == OptimizerKind::adagrad)
    adagrad_ = AdaGradState::for_params(params);
  else
    adam_ = AdamState::for_params(params);
}

void Optimizer::step(ParameterSet& params, const ParameterGradient& grad, double rate, Direction direction) {
  if (kind_ == OptimizerKind::adagrad)
    adagrad_step(params, grad, adagrad_, rate, direction);
  else
    adam_step(params, grad, adam_, rate, direction);
}

}  // namespace selectnet
