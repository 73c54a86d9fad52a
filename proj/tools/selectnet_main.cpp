#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "selectnet/commands.hpp"
#include "selectnet/runtime.hpp"

int main(int argc, char** argv) {
  using namespace selectnet;
  tune_allocator();
  CLI::App app{"Mesh-free PDE solver with least-squares, SelectNet and binary-weighted training"};
  app.set_version_flag("--version", build_version());
  app.require_subcommand(1);

  RunOptions run;
  std::uint64_t seed = 0;
  double budget = 0.0;
  auto* run_cmd = app.add_subcommand("run", "Train one model and write its error curve and parameters");
  run_cmd->add_option("config", run.config, "INI configuration file")->required();
  run_cmd->add_option("--out-dir", run.out_dir, "Output directory")->capture_default_str();
  auto* run_seed = run_cmd->add_option("--seed", seed, "Override the configured seed");
  auto* run_budget = run_cmd->add_option("--time-budget-seconds", budget, "Stop after this many seconds");

  SliceOptions slice;
  std::string plane = "x1x2";
  std::string slice_out;
  auto* slice_cmd = app.add_subcommand("slice", "Export solution, residual and selection surfaces of a saved run");
  slice_cmd->add_option("run-dir", slice.run_dir, "Directory written by `run`")->required();
  slice_cmd->add_option("--plane", plane, "x1x2 or tx1")->capture_default_str();
  slice_cmd->add_option("--grid", slice.grid, "Nodes per axis")->capture_default_str();
  slice_cmd->add_option("--out-dir", slice_out, "Output directory (default: the run directory)");

  CompareOptions compare;
  int trials = 0;
  std::string methods;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several methods over seeded trials and write statistics");
  cmp_cmd->add_option("config", compare.config, "INI configuration file")->required();
  cmp_cmd->add_option("--out-dir", compare.out_dir, "Output directory")->capture_default_str();
  auto* cmp_seed = cmp_cmd->add_option("--seed", seed, "Base seed; trial i uses seed + i");
  auto* cmp_budget = cmp_cmd->add_option("--time-budget-seconds", budget, "Per-trial time budget");
  auto* cmp_trials = cmp_cmd->add_option("--trials", trials, "Override [compare] trials");
  auto* cmp_methods = cmp_cmd->add_option("--methods", methods, "Comma-separated methods");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      if (*run_seed) run.overrides.seed = seed;
      if (*run_budget) run.overrides.time_budget_seconds = budget;
      return run_command(run, std::cout);
    }
    if (*slice_cmd) {
      slice.plane = parse_slice_plane(plane);
      if (!slice_out.empty()) slice.out_dir = slice_out;
      return slice_command(slice, std::cout);
    }
    if (*cmp_seed) compare.overrides.seed = seed;
    if (*cmp_budget) compare.overrides.time_budget_seconds = budget;
    if (*cmp_trials) compare.trials = trials;
    if (*cmp_methods) {
      std::vector<Method> list;
      std::stringstream ss(methods);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) list.push_back(parse_method(item));
      compare.methods = list;
    }
    return compare_command(compare, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
