#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace aif {

// Full description of an experiment: environment, agent, scale, seeds, and
// every tunable the agents and replay machinery expose. Round-trips through
// a flat key = value text file losslessly.
struct ExperimentConfig {
  std::string env = "cartpole";      // cartpole | acrobot
  std::string agent = "aif";         // aif | qlearning | actorcritic
  int episodes = 15000;
  int trials = 20;
  std::uint64_t seed = 1;
  std::string out_dir = "runs/default";
  int log_every = 0;                 // 0 = quiet
  int workers = 0;                   // 0 = hardware concurrency

  double gamma_precision = 1.0;
  double discount = 0.99;
  bool entropy_enabled = true;
  bool epistemic_enabled = true;
  double epistemic_weight = 1.0;
  double posterior_std = 0.1;
  double learning_rate = 0.001;
  int hidden_units = 100;

  int buffer_capacity = 100000;
  int batch_size = 64;
  int target_sync_period = 50;
  double boltzmann_beta = 1.0;
  double angle_limit_deg = 12.0;

  int collapse_window = 100;
  // NaN = use the environment default (cartpole 50, acrobot -450).
  double collapse_threshold = std::nan("");
  bool save_agents = false;

  double resolved_collapse_threshold() const {
    if (!std::isnan(collapse_threshold)) return collapse_threshold;
    return env == "acrobot" ? -450.0 : 50.0;
  }

  void validate() const {
    if (env != "cartpole" && env != "acrobot") {
      throw std::invalid_argument("config: unknown env '" + env + "'");
    }
    if (agent != "aif" && agent != "qlearning" && agent != "actorcritic") {
      throw std::invalid_argument("config: unknown agent '" + agent + "'");
    }
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (episodes < 1) throw std::invalid_argument("config: episodes must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (buffer_capacity < batch_size) {
      throw std::invalid_argument("config: buffer_capacity < batch_size");
    }
    if (target_sync_period < 1) {
      throw std::invalid_argument("config: target_sync_period must be >= 1");
    }
    if (collapse_window < 1) {
      throw std::invalid_argument("config: collapse_window must be >= 1");
    }
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "auto";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, const std::string& key) {
  if (s == "auto") return std::nan("");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + s + "'");
  }
  if (pos != s.size()) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + s + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("config: bad bool for " + key + ": '" + s + "'");
}

}  // namespace detail

inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "env = " << c.env << "\n";
  out << "agent = " << c.agent << "\n";
  out << "episodes = " << c.episodes << "\n";
  out << "trials = " << c.trials << "\n";
  out << "seed = " << c.seed << "\n";
  out << "out_dir = " << c.out_dir << "\n";
  out << "log_every = " << c.log_every << "\n";
  out << "workers = " << c.workers << "\n";
  out << "gamma_precision = " << detail::fmt_double(c.gamma_precision) << "\n";
  out << "discount = " << detail::fmt_double(c.discount) << "\n";
  out << "entropy_enabled = " << (c.entropy_enabled ? "true" : "false") << "\n";
  out << "epistemic_enabled = " << (c.epistemic_enabled ? "true" : "false") << "\n";
  out << "epistemic_weight = " << detail::fmt_double(c.epistemic_weight) << "\n";
  out << "posterior_std = " << detail::fmt_double(c.posterior_std) << "\n";
  out << "learning_rate = " << detail::fmt_double(c.learning_rate) << "\n";
  out << "hidden_units = " << c.hidden_units << "\n";
  out << "buffer_capacity = " << c.buffer_capacity << "\n";
  out << "batch_size = " << c.batch_size << "\n";
  out << "target_sync_period = " << c.target_sync_period << "\n";
  out << "boltzmann_beta = " << detail::fmt_double(c.boltzmann_beta) << "\n";
  out << "angle_limit_deg = " << detail::fmt_double(c.angle_limit_deg) << "\n";
  out << "collapse_window = " << c.collapse_window << "\n";
  out << "collapse_threshold = " << detail::fmt_double(c.collapse_threshold) << "\n";
  out << "save_agents = " << (c.save_agents ? "true" : "false") << "\n";
  return out.str();
}

inline void apply_config_line(ExperimentConfig& c, const std::string& key,
                              const std::string& value) {
  using detail::parse_bool;
  using detail::parse_double;
  if (key == "env") c.env = value;
  else if (key == "agent") c.agent = value;
  else if (key == "episodes") c.episodes = int(parse_double(value, key));
  else if (key == "trials") c.trials = int(parse_double(value, key));
  else if (key == "seed") c.seed = std::uint64_t(std::stoull(value));
  else if (key == "out_dir") c.out_dir = value;
  else if (key == "log_every") c.log_every = int(parse_double(value, key));
  else if (key == "workers") c.workers = int(parse_double(value, key));
  else if (key == "gamma_precision") c.gamma_precision = parse_double(value, key);
  else if (key == "discount") c.discount = parse_double(value, key);
  else if (key == "entropy_enabled") c.entropy_enabled = parse_bool(value, key);
  else if (key == "epistemic_enabled") c.epistemic_enabled = parse_bool(value, key);
  else if (key == "epistemic_weight") c.epistemic_weight = parse_double(value, key);
  else if (key == "posterior_std") c.posterior_std = parse_double(value, key);
  else if (key == "learning_rate") c.learning_rate = parse_double(value, key);
  else if (key == "hidden_units") c.hidden_units = int(parse_double(value, key));
  else if (key == "buffer_capacity") c.buffer_capacity = int(parse_double(value, key));
  else if (key == "batch_size") c.batch_size = int(parse_double(value, key));
  else if (key == "target_sync_period") c.target_sync_period = int(parse_double(value, key));
  else if (key == "boltzmann_beta") c.boltzmann_beta = parse_double(value, key);
  else if (key == "angle_limit_deg") c.angle_limit_deg = parse_double(value, key);
  else if (key == "collapse_window") c.collapse_window = int(parse_double(value, key));
  else if (key == "collapse_threshold") c.collapse_threshold = parse_double(value, key);
  else if (key == "save_agents") c.save_agents = parse_bool(value, key);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " has no '='");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    apply_config_line(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  return parse_config(in);
}

}  // namespace aif
