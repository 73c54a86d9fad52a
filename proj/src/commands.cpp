#include "selectnet/commands.hpp"

#include <cmath>
#include <json.hpp>
#include <limits>
#include <stdexcept>

namespace selectnet {

namespace {

struct Prepared {
  ExperimentConfig config;
  ProblemSpec problem;
};

Prepared prepare(const std::filesystem::path& path, const Overrides& overrides) {
  ExperimentConfig config = load_config(path);
  if (overrides.seed) config.train.seed = *overrides.seed;
  if (overrides.time_budget_seconds) config.train.time_budget_seconds = *overrides.time_budget_seconds;
  ProblemSpec problem = problem_for(config.train);
  try {
    config.train.validate(problem);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return {std::move(config), std::move(problem)};
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  if (count > 1) out.back() = hi;
  return out;
}

}  // namespace

int run_command(const RunOptions& options, std::ostream& log) {
  Prepared p;
  try {
    p = prepare(options.config, options.overrides);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  const RunResult run = train(p.config.train, p.problem);
  const RunManifest manifest = save_run(options.out_dir, p.config, run);
  log << "run " << to_string(run.status) << ": " << run.iterations_run << " iterations";
  if (!run.records.empty()) log << ", final rel_l2_error " << format_double(run.records.back().rel_l2_error);
  log << "\nartifacts in " << manifest.directory.string() << "\n";
  if (run.status == RunStatus::diverged) {
    log << "diverged: " << run.diagnostic << "\n";
    return kExitDiverged;
  }
  return kExitOk;
}

SlicePlane parse_slice_plane(std::string_view name) {
  if (name == "x1x2") return SlicePlane::x1x2;
  if (name == "tx1") return SlicePlane::tx1;
  throw std::invalid_argument("unknown slice plane '" + std::string(name) + "'");
}

SliceGrid make_slice_grid(const ProblemSpec& problem, SlicePlane plane, int grid) {
  if (grid < 2) throw std::invalid_argument("slice: grid must be >= 2");
  if (plane == SlicePlane::tx1 && !problem.time_dependent())
    throw std::invalid_argument("slice: plane tx1 needs a time-dependent problem");
  SliceGrid g;
  if (plane == SlicePlane::x1x2) {
    g.coord1 = linspace(-1.0, 1.0, grid);
    g.coord2 = linspace(-1.0, 1.0, grid);
  } else {
    g.coord1 = linspace(0.0, problem.domain.final_time, grid);
    g.coord2 = linspace(-1.0, 1.0, grid);
  }
  const auto nodes = static_cast<Eigen::Index>(grid) * grid;
  g.points = Points::Zero(problem.input_dim(), nodes);
  const Eigen::Index t_row = problem.space_dim();
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const Eigen::Index col = static_cast<Eigen::Index>(i) * grid + j;
      const double a = g.coord1[static_cast<std::size_t>(i)];
      const double b = g.coord2[static_cast<std::size_t>(j)];
      if (plane == SlicePlane::x1x2) {
        g.points(0, col) = a;
        g.points(1, col) = b;
      } else {
        g.points(t_row, col) = a;
        g.points(0, col) = b;
      }
    }
  return g;
}

SliceValues compute_slices(const ProblemSpec& problem, const LoadedRun& run, const SliceGrid& grid,
                           const OperatorConfig& op) {
  SliceValues v;
  const Eigen::Index n = grid.points.cols();
  v.solution = run.solution.forward(grid.points);

  std::vector<Eigen::Index> inside;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double* p = grid.points.col(j).data();
    if (problem.domain.in_closure({p, static_cast<std::size_t>(grid.points.rows())}, 1e-12)) inside.push_back(j);
  }
  v.residual = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  if (!inside.empty()) {
    Points sub(grid.points.rows(), static_cast<Eigen::Index>(inside.size()));
    for (std::size_t k = 0; k < inside.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = grid.points.col(inside[k]);
    const Eigen::VectorXd r = (apply_operator(problem, as_field(run.solution), sub, op).values -
                               evaluate_f(problem, sub)).cwiseAbs();
    for (std::size_t k = 0; k < inside.size(); ++k) v.residual(inside[k]) = r(static_cast<Eigen::Index>(k));
  }
  v.selection = run.interior_selection ? run.interior_selection->forward(grid.points) : Eigen::VectorXd::Ones(n);
  return v;
}

std::string slice_csv(const SliceGrid& grid, const Eigen::VectorXd& values) {
  std::string out = std::string(kSliceHeader) + "\n";
  const std::size_t g2 = grid.coord2.size();
  for (std::size_t i = 0; i < grid.coord1.size(); ++i)
    for (std::size_t j = 0; j < g2; ++j)
      out += format_double(grid.coord1[i]) + "," + format_double(grid.coord2[j]) + "," +
             format_double(values(static_cast<Eigen::Index>(i * g2 + j))) + "\n";
  return out;
}

int slice_command(const SliceOptions& options, std::ostream& log) {
  std::optional<LoadedRun> run;
  ProblemSpec problem;
  SliceGrid grid;
  try {
    run.emplace(load_run(options.run_dir));
    problem = problem_for(run->config.train);
    grid = make_slice_grid(problem, options.plane, options.grid);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  const SliceValues v = compute_slices(problem, *run, grid, run->config.train.op);
  const auto dir = options.out_dir.value_or(options.run_dir);
  std::filesystem::create_directories(dir);
  const std::string tag = options.plane == SlicePlane::x1x2 ? "x1x2" : "tx1";
  write_text(dir / ("slice_" + tag + "_solution.csv"), slice_csv(grid, v.solution));
  write_text(dir / ("slice_" + tag + "_residual.csv"), slice_csv(grid, v.residual));
  write_text(dir / ("slice_" + tag + "_selection.csv"), slice_csv(grid, v.selection));
  log << "slices written to " << dir.string() << "\n";
  return kExitOk;
}

int compare_command(const CompareOptions& options, std::ostream& log) {
  Prepared p;
  try {
    p = prepare(options.config, options.overrides);
    if (options.trials) {
      if (*options.trials < 1) throw ConfigError("config: trials must be >= 1");
      p.config.compare.trials = *options.trials;
    }
    if (options.methods) p.config.compare.methods = *options.methods;
    for (Method m : p.config.compare.methods) {
      TrainConfig cfg = p.config.train;
      cfg.method = m;
      cfg.validate(p.problem);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<StatsRow> rows;
  std::string trials = "method,trial,seed,final_error\n";
  bool diverged = false;
  for (Method m : p.config.compare.methods) {
    TrainConfig cfg = p.config.train;
    cfg.method = m;
    TrialStats stats = run_trials(cfg, p.problem, p.config.compare.trials, cfg.seed);
    for (std::size_t i = 0; i < stats.errors.size(); ++i) {
      trials += std::string(to_string(m)) + "," + std::to_string(i) + "," + std::to_string(stats.seeds[i]) + "," +
                format_double(stats.errors[i]) + "\n";
      diverged = diverged || !std::isfinite(stats.errors[i]);
    }
    log << to_string(m) << ": mean " << format_double(stats.mean) << " stdev " << format_double(stats.stdev) << "\n";
    rows.push_back({m, std::move(stats)});
  }

  std::filesystem::create_directories(options.out_dir);
  write_text(options.out_dir / "compare.csv", stats_csv(rows));
  write_text(options.out_dir / "trials.csv", trials);
  write_text(options.out_dir / "config.ini", to_ini(p.config));
  nlohmann::json meta;
  meta["seed"] = p.config.train.seed;
  meta["rng_algorithm"] = std::string(RngStream::algorithm());
  meta["build_version"] = build_version();
  meta["artifacts"] = {"compare.csv", "trials.csv", "config.ini", "metadata.json"};
  write_text(options.out_dir / "metadata.json", meta.dump(2) + "\n");
  return diverged ? kExitDiverged : kExitOk;
}

}  // namespace selectnet
