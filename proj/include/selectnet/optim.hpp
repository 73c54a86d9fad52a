#pragma once

#include <cstdint>
#include <string_view>

#include "selectnet/grad.hpp"
#include "selectnet/net.hpp"

namespace selectnet {

/// Staircase learning rate 10^(base + (final - base) j / segments) over
/// `segments` equal slices of the run. With floor_after > 0 the staircase
/// spans the first floor_after iterations and floor_rate is used afterwards.
struct ScheduleSpec {
  std::int64_t total_iterations = 20000;
  std::int64_t segments = 1000;
  double base_exponent = -3.0;
  double final_exponent = -6.0;
  double selection_rate = 1e-4;
  std::int64_t floor_after = 0;
  double floor_rate = 1e-6;

  void validate() const;
};

/// Rate for iteration k in [1, total_iterations].
double lr_schedule(std::int64_t k, const ScheduleSpec& spec);

enum class Direction { descend, ascend };

enum class OptimizerKind { adagrad, adam };
std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct AdaGradState {
  ParameterSet accumulator;
  double delta = 1e-8;

  static AdaGradState for_params(const ParameterSet& params, double delta = 1e-8);
};

/// accumulator += g^2; params -/+= rate * g / (sqrt(accumulator) + delta).
void adagrad_step(ParameterSet& params, const ParameterGradient& grad, AdaGradState& state, double rate,
                  Direction direction);

struct AdamState {
  ParameterSet first;
  ParameterSet second;
  std::int64_t steps = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double delta = 1e-8;

  static AdamState for_params(const ParameterSet& params);
};

void adam_step(ParameterSet& params, const ParameterGradient& grad, AdamState& state, double rate,
               Direction direction);

/// Per-network optimizer state of either kind.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, const ParameterSet& params);

  OptimizerKind kind() const { return kind_; }
  void step(ParameterSet& params, const ParameterGradient& grad, double rate, Direction direction);

 private:
  OptimizerKind kind_;
  AdaGradState adagrad_;
  AdamState adam_;
};

}  // namespace selectnet
