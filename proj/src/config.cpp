#include "selectnet/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace selectnet {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument("'" + text + "' is not a valid number");
  return value;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(parse_method(t));
  }
  if (out.empty()) throw std::invalid_argument("method list is empty");
  return out;
}

std::string join_methods(const std::vector<Method>& methods) {
  std::string out;
  for (std::size_t i = 0; i < methods.size(); ++i) out += (i ? "," : "") + std::string(to_string(methods[i]));
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
std::string number_text(T v) {
  if constexpr (std::is_floating_point_v<T>)
    return format_double(v);
  else
    return std::to_string(v);
}

/// Field bound to a numeric member reached through `member`.
template <typename T, typename Access>
Field numeric(const char* section, const char* key, Access member) {
  return {section, key, [member](ExperimentConfig& c, const std::string& v) { member(c) = parse_number<T>(v); },
          [member](const ExperimentConfig& c) {
            ExperimentConfig copy = c;
            return number_text(member(copy));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    using E = ExperimentConfig;
    f.push_back({"problem", "problem", [](E& c, const std::string& v) { c.train.problem = trim(v); },
                 [](const E& c) { return c.train.problem; }});
    f.push_back(numeric<Eigen::Index>("problem", "d", [](E& c) -> auto& { return c.train.d; }));
    f.push_back(numeric<double>("problem", "h", [](E& c) -> auto& { return c.train.op.h; }));
    f.push_back({"problem", "boundary",
                 [](E& c, const std::string& v) { c.train.boundary = parse_boundary_mode(trim(v)); },
                 [](const E& c) { return std::string(to_string(c.train.boundary)); }});

    f.push_back(numeric<std::size_t>("network", "m", [](E& c) -> auto& { return c.train.m; }));
    f.push_back(numeric<std::size_t>("network", "L", [](E& c) -> auto& { return c.train.L; }));
    f.push_back({"network", "activation",
                 [](E& c, const std::string& v) { c.train.activation = parse_activation(trim(v)); },
                 [](const E& c) { return std::string(to_string(c.train.activation)); }});

    f.push_back(numeric<std::size_t>("selection", "m_s", [](E& c) -> auto& { return c.train.m_s; }));
    f.push_back(numeric<std::size_t>("selection", "L_s", [](E& c) -> auto& { return c.train.L_s; }));
    f.push_back(numeric<double>("selection", "m0", [](E& c) -> auto& { return c.train.m0; }));
    f.push_back(numeric<double>("selection", "M0", [](E& c) -> auto& { return c.train.M0; }));
    f.push_back(numeric<double>("selection", "epsilon", [](E& c) -> auto& { return c.train.weights.epsilon; }));
    f.push_back(numeric<double>("selection", "tau_s", [](E& c) -> auto& { return c.train.schedule.selection_rate; }));
    f.push_back({"selection", "init",
                 [](E& c, const std::string& v) { c.train.selection_init = parse_selection_init(trim(v)); },
                 [](const E& c) { return std::string(to_string(c.train.selection_init)); }});
    f.push_back({"selection", "activation",
                 [](E& c, const std::string& v) { c.train.selection_activation = parse_activation(trim(v)); },
                 [](const E& c) { return std::string(to_string(c.train.selection_activation)); }});

    f.push_back({"training", "method", [](E& c, const std::string& v) { c.train.method = parse_method(trim(v)); },
                 [](const E& c) { return std::string(to_string(c.train.method)); }});
    f.push_back(numeric<std::int64_t>("training", "n", [](E& c) -> auto& { return c.train.n; }));
    f.push_back(numeric<std::int64_t>("training", "n1", [](E& c) -> auto& { return c.train.n1; }));
    f.push_back(numeric<std::int64_t>("training", "n2", [](E& c) -> auto& { return c.train.n2; }));
    f.push_back(numeric<double>("training", "lambda", [](E& c) -> auto& { return c.train.weights.lambda; }));
    f.push_back(numeric<std::uint64_t>("training", "seed", [](E& c) -> auto& { return c.train.seed; }));
    f.push_back(numeric<std::int64_t>("training", "eval_every", [](E& c) -> auto& { return c.train.eval_every; }));
    f.push_back({"training", "optimizer",
                 [](E& c, const std::string& v) { c.train.optimizer = parse_optimizer(trim(v)); },
                 [](const E& c) { return std::string(to_string(c.train.optimizer)); }});
    f.push_back(numeric<std::int64_t>("training", "segments", [](E& c) -> auto& { return c.train.schedule.segments; }));
    f.push_back(
        numeric<std::int64_t>("training", "floor_after", [](E& c) -> auto& { return c.train.schedule.floor_after; }));
    f.push_back(numeric<double>("training", "floor_rate", [](E& c) -> auto& { return c.train.schedule.floor_rate; }));
    f.push_back({"training", "time_budget_seconds",
                 [](E& c, const std::string& v) {
                   const std::string t = trim(v);
                   if (t.empty() || t == "none")
                     c.train.time_budget_seconds.reset();
                   else
                     c.train.time_budget_seconds = parse_number<double>(t);
                 },
                 [](const E& c) {
                   return c.train.time_budget_seconds ? format_double(*c.train.time_budget_seconds) : "none";
                 }});

    f.push_back(numeric<Eigen::Index>("sampling", "N1", [](E& c) -> auto& { return c.train.N1; }));
    f.push_back(numeric<Eigen::Index>("sampling", "N2", [](E& c) -> auto& { return c.train.N2; }));
    f.push_back(numeric<Eigen::Index>("sampling", "N_a", [](E& c) -> auto& { return c.train.N_a; }));
    f.push_back({"sampling", "strategy",
                 [](E& c, const std::string& v) { c.train.strategy = parse_sampling_strategy(trim(v)); },
                 [](const E& c) { return std::string(to_string(c.train.strategy)); }});
    f.push_back(numeric<Eigen::Index>("sampling", "test_points", [](E& c) -> auto& { return c.train.test_points; }));

    f.push_back(numeric<double>("binary", "p", [](E& c) -> auto& { return c.train.binary.fraction; }));
    f.push_back(numeric<double>("binary", "w_L", [](E& c) -> auto& { return c.train.binary.large; }));
    f.push_back(numeric<double>("binary", "w_S", [](E& c) -> auto& { return c.train.binary.small; }));

    f.push_back({"compare", "methods", [](E& c, const std::string& v) { c.compare.methods = parse_methods(v); },
                 [](const E& c) { return join_methods(c.compare.methods); }});
    f.push_back(numeric<int>("compare", "trials", [](E& c) -> auto& { return c.compare.trials; }));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (section == f.section && key == f.key) return &f;
  return nullptr;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.message()) + " at line " + std::to_string(e.line()));
  }
  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' must belong to a section");
    for (const auto& [key, value] : body) {
      const Field* f = find_field(section, key);
      if (!f) throw ConfigError("config: unknown key '" + key + "' in section [" + section + "]");
      try {
        f->set(config, value.data());
      } catch (const std::exception& e) {
        throw ConfigError("config: [" + section + "] " + key + ": " + e.what());
      }
    }
  }
  if (config.compare.trials < 1) throw ConfigError("config: [compare] trials must be >= 1");
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_ini(const ExperimentConfig& config) {
  std::string out;
  std::string current;
  for (const auto& f : fields()) {
    if (current != f.section) {
      if (!current.empty()) out += "\n";
      current = f.section;
      out += "[" + current + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(config) + "\n";
  }
  return out;
}

ProblemSpec problem_for(const TrainConfig& config) {
  try {
    return make_problem(config.problem, config.d);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace selectnet
