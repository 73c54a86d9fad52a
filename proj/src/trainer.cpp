#include "selectnet/trainer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace selectnet {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::basic:
      return "basic";
    case Method::selectnet:
      return "selectnet";
    case Method::binary:
      return "binary";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "basic") return Method::basic;
  if (name == "selectnet") return Method::selectnet;
  if (name == "binary") return Method::binary;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(BoundaryMode mode) { return mode == BoundaryMode::penalty ? "penalty" : "conforming"; }

BoundaryMode parse_boundary_mode(std::string_view name) {
  if (name == "penalty") return BoundaryMode::penalty;
  if (name == "conforming") return BoundaryMode::conforming;
  throw std::invalid_argument("unknown boundary mode '" + std::string(name) + "'");
}

std::string_view to_string(SelectionInit init) { return init == SelectionInit::zero ? "zero" : "unit_mean"; }

SelectionInit parse_selection_init(std::string_view name) {
  if (name == "zero") return SelectionInit::zero;
  if (name == "unit_mean") return SelectionInit::unit_mean;
  throw std::invalid_argument("unknown selection init '" + std::string(name) + "'");
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::time_budget:
      return "time_budget";
    case RunStatus::diverged:
      return "diverged";
  }
  return "?";
}

ScheduleSpec TrainConfig::effective_schedule() const {
  ScheduleSpec s = schedule;
  s.total_iterations = n;
  return s;
}

SamplerConfig TrainConfig::sampler() const {
  SamplerConfig s;
  s.annuli = N_a;
  s.interior_count = N1;
  s.boundary_count = boundary == BoundaryMode::penalty ? N2 : 0;
  s.strategy = strategy;
  return s;
}

void TrainConfig::validate(const ProblemSpec& problem) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (problem.name != this->problem) fail("problem '" + this->problem + "' does not match '" + problem.name + "'");
  if (problem.name != "poisson2d" && problem.space_dim() != d)
    fail("d=" + std::to_string(d) + " does not match the problem dimension");
  NetworkShape{static_cast<std::size_t>(problem.input_dim()), m, L}.validate();
  if (n < 0) fail("n must be >= 0");
  if (n1 < 1 || n2 < 1) fail("n1 and n2 must be >= 1");
  if (eval_every < 1) fail("eval_every must be >= 1");
  if (test_points < 1) fail("test_points must be >= 1");
  if (N2 < 1 && boundary == BoundaryMode::penalty) fail("N2 must be >= 1 with boundary penalty");
  sampler().validate();
  const bool ball = problem.domain.kind != Domain::Kind::cube;
  if (ball && strategy == SamplingStrategy::annular && test_points % N_a != 0)
    fail("test_points must be divisible by N_a");
  if (ball && strategy == SamplingStrategy::annular && problem.time_dependent() && (N2 / 2) % N_a != 0 && N2 / 2 > 0)
    fail("floor(N2/2) bottom points must be divisible by N_a");
  if (boundary == BoundaryMode::conforming) {
    if (problem.conforming_mask == Mask::none) fail("problem " + problem.name + " has no boundary-conforming mask");
    if (problem.time_dependent()) fail("conforming mode covers only stationary problems");
  }
  weights.validate();
  op.validate();
  effective_schedule().validate();
  if (time_budget_seconds && !(*time_budget_seconds > 0.0)) fail("time budget must be positive");
  if (method == Method::selectnet) {
    NetworkShape{static_cast<std::size_t>(problem.input_dim()), m_s, L_s}.validate();
    if (!(M0 > 1.0 && 1.0 > m0 && m0 >= 0.0)) fail("selection bounds must satisfy M0 > 1 > m0 >= 0");
  }
  if (method == Method::binary) binary.validate();
}

InitialNetworks initialize_networks(const TrainConfig& config, const ProblemSpec& problem) {
  const auto in = static_cast<std::size_t>(problem.input_dim());
  RngStream init(config.seed, StreamTag::init_solution);
  const Mask mask = config.boundary == BoundaryMode::conforming ? problem.conforming_mask : Mask::none;
  InitialNetworks nets{SolutionAnsatz(init_network({in, config.m, config.L}, config.activation, init), mask), {}, {}};
  if (config.method == Method::selectnet) {
    const NetworkShape sel{in, config.m_s, config.L_s};
    RngStream si(config.seed, StreamTag::init_selection_interior);
    nets.interior_selection.emplace(init_network(sel, config.selection_activation, si), config.m0, config.M0);
    if (config.boundary == BoundaryMode::penalty) {
      RngStream sb(config.seed, StreamTag::init_selection_boundary);
      nets.boundary_selection.emplace(init_network(sel, config.selection_activation, sb), config.m0, config.M0);
    }
    if (config.selection_init == SelectionInit::unit_mean) {
      const double q = (1.0 - config.m0) / (config.M0 - config.m0);
      const double logit = std::log(q / (1.0 - q));
      for (auto* s : {&nets.interior_selection, &nets.boundary_selection})
        if (*s) (*s)->core().parameters().biases.back()(0) = logit;
    }
  }
  return nets;
}

Points draw_test_points(const TrainConfig& config, const ProblemSpec& problem) {
  RngStream rng(config.seed, StreamTag::test);
  return sample_interior(problem, config.sampler(), config.test_points, rng);
}

double relative_l2(const Eigen::VectorXd& predicted, const Eigen::VectorXd& exact) {
  if (predicted.size() != exact.size()) throw std::invalid_argument("relative_l2: size mismatch");
  const double denom = exact.squaredNorm();
  if (!(denom > 0.0)) throw std::domain_error("relative_l2: exact solution vanishes on the test set");
  return std::sqrt((predicted - exact).squaredNorm() / denom);
}

double evaluate_error(const FieldFn& u, const ProblemSpec& problem, const Points& test_points) {
  return relative_l2(u(test_points), evaluate_pointwise(problem.exact_u, test_points));
}

double evaluate_error(const SolutionAnsatz& ansatz, const ProblemSpec& problem, const Points& test_points) {
  return evaluate_error(as_field(ansatz), problem, test_points);
}

RunResult train(const TrainConfig& config, const ProblemSpec& problem) {
  config.validate(problem);
  auto nets = initialize_networks(config, problem);
  RunResult result{std::move(nets.solution), std::move(nets.interior_selection), std::move(nets.boundary_selection),
                   {}, RunStatus::completed, {}, 0, config, std::string(RngStream::algorithm())};
  if (config.n == 0) return result;

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const Points test = draw_test_points(config, problem);
  const Eigen::VectorXd test_exact = evaluate_pointwise(problem.exact_u, test);
  const SamplerConfig sampler = config.sampler();
  const ScheduleSpec schedule = config.effective_schedule();
  const bool with_boundary = config.boundary == BoundaryMode::penalty;
  RngStream interior_rng(config.seed, StreamTag::interior);
  RngStream boundary_rng(config.seed, StreamTag::boundary);

  SolutionAnsatz& u = result.solution;
  Optimizer opt(config.optimizer, u.core().parameters());
  std::optional<Optimizer> opt_in, opt_bd;
  if (result.interior_selection) opt_in.emplace(config.optimizer, result.interior_selection->core().parameters());
  if (result.boundary_selection) opt_bd.emplace(config.optimizer, result.boundary_selection->core().parameters());

  auto method_loss = [&](const ResidualEvaluation& res, const Points& interior) {
    switch (config.method) {
      case Method::selectnet:
        return selectnet_loss(res, *result.interior_selection,
                              res.boundary_count() > 0 ? &*result.boundary_selection : nullptr, interior,
                              config.weights);
      case Method::binary:
        return binary_weighted_loss(res, config.binary, config.weights);
      case Method::basic:
        break;
    }
    return basic_loss(res, config.weights);
  };

  auto record = [&](std::int64_t k, const LossComponents& c, double lr) {
    TrainRecord r;
    r.iteration = k;
    r.loss_interior = c.interior_term;
    r.loss_boundary = c.boundary_term;
    r.loss_penalty = c.penalty_term;
    r.rel_l2_error = relative_l2(u.forward(test), test_exact);
    r.lr = lr;
    r.seconds = elapsed();
    result.records.push_back(r);
  };

  for (std::int64_t k = 1; k <= config.n; ++k) {
    if (config.time_budget_seconds && elapsed() >= *config.time_budget_seconds) {
      result.status = RunStatus::time_budget;
      break;
    }
    const SampleBatch batch = sample_batch(problem, sampler, interior_rng, boundary_rng, with_boundary);
    const double lr = lr_schedule(k, schedule);
    ResidualEvaluation res = evaluate_residuals(u, problem, batch, config.op);

    // theta_s first: ascent on the same batch, theta fixed so residuals are shared
    if (config.method == Method::selectnet) {
      for (std::int64_t j = 0; j < config.n1; ++j) {
        const LossResult l = method_loss(res, batch.interior);
        opt_in->step(result.interior_selection->core().parameters(),
                     selection_gradient(result.interior_selection->core(), *l.interior_selection),
                     schedule.selection_rate, Direction::ascend);
        if (l.boundary_selection)
          opt_bd->step(result.boundary_selection->core().parameters(),
                       selection_gradient(result.boundary_selection->core(), *l.boundary_selection),
                       schedule.selection_rate, Direction::ascend);
      }
    }

    LossComponents last;
    for (std::int64_t j = 0; j < config.n2; ++j) {
      if (j > 0) res = evaluate_residuals(u, problem, batch, config.op);
      const LossResult l = method_loss(res, batch.interior);
      last = l.components;
      const ParameterGradient g = solution_gradient(u.core(), res, l);
      if (!std::isfinite(l.components.total) || !g.all_finite()) {
        result.status = RunStatus::diverged;
        result.diagnostic = "non-finite loss or gradient at iteration " + std::to_string(k) +
                            " (total=" + std::to_string(l.components.total) + ")";
        break;
      }
      opt.step(u.core().parameters(), g, lr, Direction::descend);
    }
    result.iterations_run = k;
    if (result.status == RunStatus::diverged) {
      record(k, last, lr);
      break;
    }
    if (k % config.eval_every == 0 || k == config.n) record(k, last, lr);
  }
  return result;
}

TrialStats summarize_errors(std::vector<double> errors) {
  TrialStats s;
  s.errors = std::move(errors);
  const auto count = static_cast<double>(s.errors.size());
  if (s.errors.empty()) return s;
  for (double e : s.errors) s.mean += e;
  s.mean /= count;
  if (s.errors.size() > 1) {
    double acc = 0.0;
    for (double e : s.errors) acc += (e - s.mean) * (e - s.mean);
    s.stdev = std::sqrt(acc / (count - 1.0));
    s.cv = s.stdev / s.mean;
  }
  return s;
}

TrialStats run_trials(const TrainConfig& config, const ProblemSpec& problem, int trial_count, std::uint64_t base_seed) {
  if (trial_count < 1) throw std::invalid_argument("run_trials: trial_count must be >= 1");
  std::vector<double> errors;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < trial_count; ++i) {
    TrainConfig cfg = config;
    cfg.seed = base_seed + static_cast<std::uint64_t>(i);
    const RunResult run = train(cfg, problem);
    errors.push_back(run.records.empty() ? evaluate_error(run.solution, problem, draw_test_points(cfg, problem))
                                         : run.records.back().rel_l2_error);
    seeds.push_back(cfg.seed);
  }
  TrialStats stats = summarize_errors(std::move(errors));
  stats.seeds = std::move(seeds);
  return stats;
}

}  // namespace selectnet
