#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "selectnet/artifacts.hpp"

namespace selectnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> time_budget_seconds;
};

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = "run";
  Overrides overrides;
};

int run_command(const RunOptions& options, std::ostream& log);

enum class SlicePlane { x1x2, tx1 };
SlicePlane parse_slice_plane(std::string_view name);

struct SliceGrid {
  std::vector<double> coord1;
  std::vector<double> coord2;
  Points points;  // coord1-major, one column per grid node
};

/// G x G nodes over the plane with every other coordinate 0. Spatial axes
/// span [-1, 1], the time axis [0, T].
SliceGrid make_slice_grid(const ProblemSpec& problem, SlicePlane plane, int grid);

struct SliceValues {
  Eigen::VectorXd solution;
  Eigen::VectorXd residual;   // |D u - f|, NaN outside the closed domain
  Eigen::VectorXd selection;  // interior selection network, 1 when the run has none
};

SliceValues compute_slices(const ProblemSpec& problem, const LoadedRun& run, const SliceGrid& grid,
                           const OperatorConfig& op);
std::string slice_csv(const SliceGrid& grid, const Eigen::VectorXd& values);

struct SliceOptions {
  std::filesystem::path run_dir;
  SlicePlane plane = SlicePlane::x1x2;
  int grid = 51;
  std::optional<std::filesystem::path> out_dir;
};

int slice_command(const SliceOptions& options, std::ostream& log);

struct CompareOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = "compare";
  Overrides overrides;
  std::optional<int> trials;
  std::optional<std::vector<Method>> methods;
};

int compare_command(const CompareOptions& options, std::ostream& log);

}  // namespace selectnet
