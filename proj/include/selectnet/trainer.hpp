#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selectnet/loss.hpp"
#include "selectnet/net.hpp"
#include "selectnet/operators.hpp"
#include "selectnet/optim.hpp"
#include "selectnet/problems.hpp"
#include "selectnet/sampling.hpp"

namespace selectnet {

enum class Method { basic, selectnet, binary };
std::string_view to_string(Method method);
Method parse_method(std::string_view name);

enum class BoundaryMode { penalty, conforming };
std::string_view to_string(BoundaryMode mode);
BoundaryMode parse_boundary_mode(std::string_view name);

/// zero: all biases 0, so phi starts near (m0+M0)/2. unit_mean: the output
/// bias is set so that phi starts near 1, where the normalization penalty
/// vanishes.
enum class SelectionInit { zero, unit_mean };
std::string_view to_string(SelectionInit init);
SelectionInit parse_selection_init(std::string_view name);
struct TrainConfig {
  Method method = Method::basic;
  std::string problem = "poisson2d";
  Eigen::Index d = 2;

  std::size_t m = 100;
  std::size_t L = 3;
  Activation activation = Activation::cubic_relu;
  std::size_t m_s = 20;
  std::size_t L_s = 3;
  Activation selection_activation = Activation::relu;
  double m0 = 0.8;
  double M0 = 5.0;
  SelectionInit selection_init = SelectionInit::zero;

  std::int64_t n = 20000;
  std::int64_t n1 = 1;
  std::int64_t n2 = 1;
  Eigen::Index N1 = 10000;
  Eigen::Index N2 = 10000;
  Eigen::Index N_a = 10;
  SamplingStrategy strategy = SamplingStrategy::annular;
  Eigen::Index test_points = 10000;

  LossWeights weights;
  BinaryWeightConfig binary;
  OperatorConfig op;
  ScheduleSpec schedule;  // total_iterations follows n
  OptimizerKind optimizer = OptimizerKind::adagrad;
  BoundaryMode boundary = BoundaryMode::penalty;

  std::uint64_t seed = 0;
  std::int64_t eval_every = 100;
  std::optional<double> time_budget_seconds;

  ScheduleSpec effective_schedule() const;
  SamplerConfig sampler() const;
  /// Throws std::invalid_argument when the config cannot run on `problem`.
  void validate(const ProblemSpec& problem) const;
};

struct TrainRecord {
  std::int64_t iteration = 0;
  double seconds = 0.0;
  double loss_interior = 0.0;
  double loss_boundary = 0.0;
  double loss_penalty = 0.0;
  double rel_l2_error = 0.0;
  double lr = 0.0;
};

enum class RunStatus { completed, time_budget, diverged };
std::string_view to_string(RunStatus status);

struct RunResult {
  SolutionAnsatz solution;
  std::optional<SelectionNetwork> interior_selection;
  std::optional<SelectionNetwork> boundary_selection;
  std::vector<TrainRecord> records;
  RunStatus status = RunStatus::completed;
  std::string diagnostic;
  std::int64_t iterations_run = 0;
  TrainConfig config;
  std::string rng_algorithm;
};

/// Networks of a run before any update.
struct InitialNetworks {
  SolutionAnsatz solution;
  std::optional<SelectionNetwork> interior_selection;
  std::optional<SelectionNetwork> boundary_selection;
};
InitialNetworks initialize_networks(const TrainConfig& config, const ProblemSpec& problem);

/// Fixed test set of a run, drawn from its own stream.
Points draw_test_points(const TrainConfig& config, const ProblemSpec& problem);

RunResult train(const TrainConfig& config, const ProblemSpec& problem);

/// sqrt(sum |u - u*|^2 / sum |u*|^2) over the test points.
double relative_l2(const Eigen::VectorXd& predicted, const Eigen::VectorXd& exact);
double evaluate_error(const FieldFn& u, const ProblemSpec& problem, const Points& test_points);
double evaluate_error(const SolutionAnsatz& ansatz, const ProblemSpec& problem, const Points& test_points);

struct TrialStats {
  std::vector<double> errors;
  std::vector<std::uint64_t> seeds;
  double mean = 0.0;
  double stdev = 0.0;  // sample standard deviation, 0 for one trial
  double cv = 0.0;
};

TrialStats summarize_errors(std::vector<double> errors);
/// Trial i runs with seed base_seed + i.
TrialStats run_trials(const TrainConfig& config, const ProblemSpec& problem, int trial_count, std::uint64_t base_seed);

}  // namespace selectnet
