#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "selectnet/trainer.hpp"

namespace selectnet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompareSpec {
  std::vector<Method> methods{Method::basic, Method::selectnet};
  int trials = 5;
};

struct ExperimentConfig {
  TrainConfig train;
  CompareSpec compare;
};

/// INI text with sections [problem] [network] [selection] [training]
/// [sampling] [binary] [compare]. Unknown sections or keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every effective parameter, in a form parse_config reads back identically.
std::string to_ini(const ExperimentConfig& config);

/// make_problem for the configured name and dimension, errors as ConfigError.
ProblemSpec problem_for(const TrainConfig& config);

std::string format_double(double value);

}  // namespace selectnet
