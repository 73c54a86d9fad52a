#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "selectnet/config.hpp"
#include "selectnet/net.hpp"
#include "selectnet/trainer.hpp"

namespace selectnet {

inline constexpr const char* kCurveHeader = "iteration,seconds,loss_interior,loss_boundary,loss_penalty,rel_l2_error,lr";
inline constexpr const char* kStatsHeader = "method,trials,mean_error,stdev,cv";
inline constexpr const char* kSliceHeader = "coord1,coord2,value";

std::string curve_csv(const std::vector<TrainRecord>& records);
/// Inverse of curve_csv; throws std::runtime_error on a malformed file.
std::vector<TrainRecord> parse_curve_csv(const std::string& text);

struct StatsRow {
  Method method;
  TrialStats stats;
};
std::string stats_csv(const std::vector<StatsRow>& rows);

std::string network_json(const MlpNetwork& net);
MlpNetwork network_from_json(const std::string& text);

/// Files of a saved run, relative to its directory.
struct RunManifest {
  std::filesystem::path directory;
  std::vector<std::string> files;
};

/// Writes curve.csv, config.ini, network JSON files and metadata.json
/// (config echo, seed, RNG algorithm, build version, status, file list).
RunManifest save_run(const std::filesystem::path& dir, const ExperimentConfig& config, const RunResult& run);

struct LoadedRun {
  ExperimentConfig config;
  SolutionAnsatz solution;
  std::optional<SelectionNetwork> interior_selection;
  std::optional<SelectionNetwork> boundary_selection;
};
LoadedRun load_run(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

std::string build_version();

}  // namespace selectnet
