#include "selectnet/artifacts.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef SELECTNET_VERSION
#define SELECTNET_VERSION "unknown"
#endif

namespace selectnet {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json network_to_json(const MlpNetwork& net) {
  json j;
  j["input_dim"] = net.shape().input_dim;
  j["width"] = net.shape().width;
  j["depth"] = net.shape().depth;
  j["activation"] = std::string(to_string(net.activation()));
  json layers = json::array();
  const auto& p = net.parameters();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    json bias = json::array();
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i) bias.push_back(p.biases[l](i));
    layers.push_back({{"weight", matrix_json(p.weights[l])}, {"bias", std::move(bias)}});
  }
  j["layers"] = std::move(layers);
  return j;
}

MlpNetwork network_from(const json& j) {
  NetworkShape shape{j.at("input_dim").get<std::size_t>(), j.at("width").get<std::size_t>(),
                     j.at("depth").get<std::size_t>()};
  MlpNetwork net = MlpNetwork::zeros(shape, parse_activation(j.at("activation").get<std::string>()));
  auto& p = net.parameters();
  const auto& layers = j.at("layers");
  if (layers.size() != p.weights.size()) throw std::runtime_error("network json: wrong layer count");
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto& w = layers[l].at("weight");
    const auto& b = layers[l].at("bias");
    if (w.size() != static_cast<std::size_t>(p.weights[l].rows()) || b.size() != static_cast<std::size_t>(p.biases[l].size()))
      throw std::runtime_error("network json: layer " + std::to_string(l) + " has the wrong shape");
    for (Eigen::Index r = 0; r < p.weights[l].rows(); ++r) {
      const auto& row = w[static_cast<std::size_t>(r)];
      if (row.size() != static_cast<std::size_t>(p.weights[l].cols()))
        throw std::runtime_error("network json: layer " + std::to_string(l) + " has the wrong shape");
      for (Eigen::Index c = 0; c < p.weights[l].cols(); ++c) p.weights[l](r, c) = row[static_cast<std::size_t>(c)];
    }
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i) p.biases[l](i) = b[static_cast<std::size_t>(i)];
  }
  return net;
}

}  // namespace

std::string build_version() { return SELECTNET_VERSION; }

std::string curve_csv(const std::vector<TrainRecord>& records) {
  std::string out = std::string(kCurveHeader) + "\n";
  for (const auto& r : records) {
    out += std::to_string(r.iteration) + "," + format_double(r.seconds) + "," + format_double(r.loss_interior) + "," +
           format_double(r.loss_boundary) + "," + format_double(r.loss_penalty) + "," + format_double(r.rel_l2_error) +
           "," + format_double(r.lr) + "\n";
  }
  return out;
}

std::vector<TrainRecord> parse_curve_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) throw std::runtime_error("curve csv: missing or wrong header");
  std::vector<TrainRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7) throw std::runtime_error("curve csv: expected 7 columns in '" + line + "'");
    TrainRecord r;
    r.iteration = std::stoll(cells[0]);
    r.seconds = to_double(cells[1]);
    r.loss_interior = to_double(cells[2]);
    r.loss_boundary = to_double(cells[3]);
    r.loss_penalty = to_double(cells[4]);
    r.rel_l2_error = to_double(cells[5]);
    r.lr = to_double(cells[6]);
    out.push_back(r);
  }
  return out;
}

std::string stats_csv(const std::vector<StatsRow>& rows) {
  std::string out = std::string(kStatsHeader) + "\n";
  for (const auto& row : rows)
    out += std::string(to_string(row.method)) + "," + std::to_string(row.stats.errors.size()) + "," +
           format_double(row.stats.mean) + "," + format_double(row.stats.stdev) + "," + format_double(row.stats.cv) +
           "\n";
  return out;
}

std::string network_json(const MlpNetwork& net) { return network_to_json(net).dump(); }

MlpNetwork network_from_json(const std::string& text) {
  try {
    return network_from(json::parse(text));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("network json: ") + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunManifest save_run(const std::filesystem::path& dir, const ExperimentConfig& config, const RunResult& run) {
  std::filesystem::create_directories(dir);
  RunManifest manifest{dir, {}};
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    manifest.files.push_back(name);
  };
  ExperimentConfig echo = config;
  echo.train = run.config;
  emit("curve.csv", curve_csv(run.records));
  emit("config.ini", to_ini(echo));
  emit("solution.json", network_json(run.solution.core()));
  if (run.interior_selection) emit("selection_interior.json", network_json(run.interior_selection->core()));
  if (run.boundary_selection) emit("selection_boundary.json", network_json(run.boundary_selection->core()));

  json meta;
  json cfg = json::object();
  std::istringstream ini(to_ini(echo));
  std::string line, section;
  while (std::getline(ini, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find(" = ");
    cfg[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  meta["config"] = std::move(cfg);
  meta["seed"] = run.config.seed;
  meta["rng_algorithm"] = run.rng_algorithm;
  meta["build_version"] = build_version();
  meta["status"] = std::string(to_string(run.status));
  meta["diagnostic"] = run.diagnostic;
  meta["iterations_run"] = run.iterations_run;
  meta["solution_mask"] = std::string(to_string(run.solution.mask()));
  meta["final_rel_l2_error"] = run.records.empty() ? json(nullptr) : json(run.records.back().rel_l2_error);
  manifest.files.push_back("metadata.json");
  meta["artifacts"] = manifest.files;
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
  return manifest;
}

LoadedRun load_run(const std::filesystem::path& dir) {
  ExperimentConfig config = parse_config(read_text(dir / "config.ini"));
  const json meta = json::parse(read_text(dir / "metadata.json"));
  const Mask mask = parse_mask(meta.at("solution_mask").get<std::string>());
  LoadedRun run{config, SolutionAnsatz(network_from_json(read_text(dir / "solution.json")), mask), {}, {}};
  if (std::filesystem::exists(dir / "selection_interior.json"))
    run.interior_selection.emplace(network_from_json(read_text(dir / "selection_interior.json")), config.train.m0,
                                   config.train.M0);
  if (std::filesystem::exists(dir / "selection_boundary.json"))
    run.boundary_selection.emplace(network_from_json(read_text(dir / "selection_boundary.json")), config.train.m0,
                                   config.train.M0);
  return run;
}

}  // namespace selectnet
