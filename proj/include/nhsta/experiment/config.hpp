#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nhsta/error.hpp"
#include "nhsta/propagator.hpp"
#include "nhsta/shortcut.hpp"
#include "nhsta/two_level.hpp"

namespace nhsta::experiment {

enum class OutputFormat { Csv, Json };

inline std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

/// Everything a command needs. Fields left unset by the config file fall
/// back to the Allen-Eberly defaults (omega0 = 1, delta0 = 9, window [-1, 1],
/// 4000 steps).
struct ExperimentConfig {
  double omega0 = 1.0;
  double delta0 = 9.0;
  double tau = 1.0;
  std::vector<double> gamma_list;  // empty means "command default"
  std::optional<double> t0;        // defaults to -t_final
  double t_final = 1.0;
  std::size_t steps = 4000;
  std::vector<Protocol> policies{Protocol::Hermitian};
  bool policies_set = false;
  std::vector<InitialCondition> initial_states{InitialCondition::EigenPlus};
  bool initial_states_set = false;
  std::string output = "nh_sta_out";
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::string> pulse_file;
  double convergence_tolerance = 1e-7;
  std::size_t threads = 0;  // 0: hardware concurrency

  double start() const { return t0.value_or(-t_final); }
  TimeGrid grid() const { return TimeGrid(start(), t_final, steps); }

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
    if (!(omega0 > 0)) fail("omega0 must be > 0");
    if (!(tau > 0)) fail("tau must be > 0");
    if (!std::isfinite(delta0)) fail("delta0 must be finite");
    if (!(start() < t_final)) fail("t0 must be < t_final");
    if (steps < 100) fail("steps must be >= 100");
    if (policies.empty()) fail("policy list is empty");
    if (initial_states.empty()) fail("initial_state list is empty");
    for (double g : gamma_list) {
      if (!(g >= 0) || !std::isfinite(g)) fail("every gamma must be finite and >= 0");
      if (std::abs(g - 2 * omega0) <= kRegimeTolerance) {
        throw Error(ErrorKind::DegenerateRegime, "gamma = 2 omega0 is degenerate at t = 0");
      }
    }
  }

  /// Effective settings as ordered key/value pairs, in config-file syntax.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw Error(ErrorKind::Config, key + ": not a number: '" + value + "'");
  return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorKind::Config, key + ": not a non-negative integer: '" + value + "'");
  }
  return static_cast<std::size_t>(std::stoull(value));
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::vector<double> parse_gamma_list(const std::string& value) {
  std::vector<double> out;
  for (const auto& item : detail::split_list(value)) out.push_back(detail::parse_double("gamma", item));
  if (out.empty()) throw Error(ErrorKind::Config, "gamma: empty list");
  return out;
}

inline std::vector<Protocol> parse_policy_list(const std::string& value) {
  std::vector<Protocol> out;
  for (const auto& item : detail::split_list(value)) {
    const auto p = parse_protocol(item);
    if (!p) throw Error(ErrorKind::Config, "policy: unknown '" + item + "' (none, naive_cd, hermitian, zero_coupling)");
    out.push_back(*p);
  }
  if (out.empty()) throw Error(ErrorKind::Config, "policy: empty list");
  return out;
}

inline std::vector<InitialCondition> parse_initial_list(const std::string& value) {
  std::vector<InitialCondition> out;
  for (const auto& item : detail::split_list(value)) {
    const auto c = parse_initial_condition(item);
    if (!c) throw Error(ErrorKind::Config, "initial_state: unknown '" + item + "' (eigen_plus, bare_ground)");
    out.push_back(*c);
  }
  if (out.empty()) throw Error(ErrorKind::Config, "initial_state: empty list");
  return out;
}

inline OutputFormat parse_format(const std::string& value) {
  if (value == "csv") return OutputFormat::Csv;
  if (value == "json") return OutputFormat::Json;
  throw Error(ErrorKind::Config, "format: expected csv or json, got '" + value + "'");
}

/// Applies one `key = value` setting.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_double;
  if (key == "omega0") cfg.omega0 = parse_double(key, value);
  else if (key == "delta0") cfg.delta0 = parse_double(key, value);
  else if (key == "tau") cfg.tau = parse_double(key, value);
  else if (key == "gamma") cfg.gamma_list = parse_gamma_list(value);
  else if (key == "t0") cfg.t0 = parse_double(key, value);
  else if (key == "t_final") cfg.t_final = parse_double(key, value);
  else if (key == "steps") cfg.steps = detail::parse_count(key, value);
  else if (key == "policy") {
    cfg.policies = parse_policy_list(value);
    cfg.policies_set = true;
  } else if (key == "initial_state") {
    cfg.initial_states = parse_initial_list(value);
    cfg.initial_states_set = true;
  } else if (key == "output") cfg.output = value;
  else if (key == "format") cfg.format = parse_format(value);
  else if (key == "pulse_file") cfg.pulse_file = value;
  else if (key == "convergence_tolerance") cfg.convergence_tolerance = parse_double(key, value);
  else if (key == "threads") cfg.threads = detail::parse_count(key, value);
  else throw Error(ErrorKind::Config, "unknown key '" + key + "'");
}

/// Flat `key = value` text; '#' starts a comment. Relative pulse_file paths
/// are resolved against the config file's directory.
inline ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = {}) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::Config, "line " + std::to_string(line_no) + ": empty key");
    apply_setting(cfg, key, value);
  }
  if (cfg.pulse_file && !base_dir.empty() && !cfg.pulse_file->empty() && cfg.pulse_file->front() != '/') {
    cfg.pulse_file = base_dir + "/" + *cfg.pulse_file;
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path + "'");
  const auto slash = path.find_last_of('/');
  return parse_config(in, slash == std::string::npos ? std::string{} : path.substr(0, slash));
}

inline std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  using detail::format_double;
  auto join = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& x : items) s += (s.empty() ? "" : ",") + fmt(x);
    return s;
  };
  std::vector<std::pair<std::string, std::string>> out{
      {"omega0", format_double(omega0)},
      {"delta0", format_double(delta0)},
      {"tau", format_double(tau)},
      {"gamma", join(gamma_list, format_double)},
      {"t0", format_double(start())},
      {"t_final", format_double(t_final)},
      {"steps", std::to_string(steps)},
      {"policy", join(policies, [](Protocol p) { return nhsta::to_string(p); })},
      {"initial_state", join(initial_states, [](InitialCondition c) { return nhsta::to_string(c); })},
      {"output", output},
      {"format", to_string(format)},
      {"pulse_file", pulse_file.value_or("")},
      {"convergence_tolerance", format_double(convergence_tolerance)},
  };
  return out;
}

/// Three columns (t, Omega_R, Delta) separated by whitespace or commas.
inline PulseSpec load_pulse_file(const std::string& path, double gamma) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open pulse file '" + path + "'");
  std::vector<double> t, omega, delta;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (auto& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream row(line);
    std::vector<double> values;
    std::string tok;
    while (row >> tok) values.push_back(detail::parse_double("pulse_file line " + std::to_string(line_no), tok));
    if (values.empty()) continue;
    if (values.size() != 3) {
      throw Error(ErrorKind::Config, "pulse file line " + std::to_string(line_no) + ": expected 3 columns");
    }
    t.push_back(values[0]);
    omega.push_back(values[1]);
    delta.push_back(values[2]);
  }
  try {
    return tabulated_pulse(std::move(t), std::move(omega), std::move(delta), gamma);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, std::string("pulse file: ") + e.what());
  }
}

/// Pulse for one decay rate: the tabulated file when configured, otherwise
/// Allen-Eberly with the configured parameters.
inline PulseSpec make_pulse(const ExperimentConfig& cfg, double gamma) {
  if (cfg.pulse_file) return load_pulse_file(*cfg.pulse_file, gamma);
  AllenEberlyParams p;
  p.omega0 = cfg.omega0;
  p.delta0 = cfg.delta0;
  p.tau = cfg.tau;
  p.gamma = gamma;
  p.t0 = cfg.start();
  p.t_final = cfg.t_final;
  return allen_eberly(p);
}

}  // namespace nhsta::experiment
