#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhsta/error.hpp"
#include "nhsta/experiment/config.hpp"
#include "nhsta/experiment/output.hpp"
#include "nhsta/experiment/pipelines.hpp"
#include "nhsta/version.hpp"

namespace nhsta::experiment {

enum ExitStatus : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitNumerical = 3 };

inline int exit_status_for(ErrorKind kind) { return is_numerical(kind) ? kExitNumerical : kExitConfig; }

/// manifest_<command>.json next to the data files. Written last, after every
/// run has finished.
inline WrittenFile write_manifest(const ExperimentConfig& cfg, const std::string& command,
                                  const CommandResult& result, double wall_seconds) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  auto& echo = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.echo()) echo[k] = v;
  j["wall_seconds"] = wall_seconds;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : result.runs) {
    nlohmann::ordered_json run{{"label", r.label}, {"gamma", r.gamma}, {"status", r.status}};
    run["convergence"] = std::isfinite(r.convergence) ? nlohmann::ordered_json(r.convergence) : nullptr;
    run["wall_seconds"] = r.wall_seconds;
    j["runs"].push_back(std::move(run));
  }
  if (!result.checks.empty()) {
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : result.checks) {
      j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}});
    }
  }
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : result.files) {
    j["files"].push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  return write_file(cfg.output, "manifest_" + command + ".json", j.dump(2) + "\n");
}

inline void print_checks(const std::vector<Check>& checks, std::ostream& out) {
  for (const auto& c : checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e (limit %.1e)", c.value, c.limit);
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << buf << "\n";
  }
}

inline CommandResult dispatch(const std::string& command, const ExperimentConfig& cfg) {
  if (command == "figure1") return cmd_figure1(cfg);
  if (command == "figure2") return cmd_figure2(cfg);
  if (command == "figure3") return cmd_figure3(cfg);
  if (command == "figure4") return cmd_figure4(cfg);
  if (command == "sweep") return cmd_sweep(cfg);
  return cmd_verify(cfg);
}

/// nh-sta <command> [--config PATH] [overrides]. Returns the process exit
/// status: 0 ok, 1 failed check, 2 config error, 3 numerical error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Shortcuts to adiabaticity for a decaying two-level system", "nh-sta"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> gamma_args;
  std::optional<std::size_t> steps;
  std::optional<double> t_final;
  std::optional<std::string> out_dir, format, policy, initial_state;
  std::optional<std::size_t> threads;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"figure1", "radicand Z(t) trajectories and branch regime"},
      {"figure2", "complex mixing angle theta(t)"},
      {"figure3", "eigenstate amplitudes |c+-|^2 and |g+-|^2 along the shortcut"},
      {"figure4", "bare-state populations along the shortcut"},
      {"verify", "run the invariant suite; exit 1 if any check fails"},
      {"sweep", "gamma x policy x initial_state end-of-run metrics"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--gamma", gamma_args, "decay rates in 1/tau (comma-separated or repeated)")->delimiter(',');
    sub->add_option("--steps", steps, "grid intervals (>= 100)");
    sub->add_option("--t-final", t_final, "end of the window in tau; t0 defaults to -t_final");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--policy", policy, "none, naive_cd, hermitian, zero_coupling (comma-separated)");
    sub->add_option("--initial-state", initial_state, "eigen_plus, bare_ground (comma-separated)");
    sub->add_option("--threads", threads, "sweep worker threads (0 = all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "nh-sta: " << e.what() << "\n";
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (const char* env = std::getenv("NH_STA_OUT"); env && *env) cfg.output = env;
    if (!gamma_args.empty()) {
      std::string joined;
      for (const auto& g : gamma_args) joined += g + ",";
      cfg.gamma_list = parse_gamma_list(joined);
    }
    if (steps) cfg.steps = *steps;
    if (t_final) cfg.t_final = *t_final;
    if (out_dir) cfg.output = *out_dir;
    if (format) cfg.format = parse_format(*format);
    if (policy) apply_setting(cfg, "policy", *policy);
    if (initial_state) apply_setting(cfg, "initial_state", *initial_state);
    if (threads) cfg.threads = *threads;
    cfg.validate();

    const auto start = std::chrono::steady_clock::now();
    const auto result = dispatch(command, cfg);
    const auto manifest = write_manifest(cfg, command, result, detail::seconds_since(start));

    if (command == "verify") print_checks(result.checks, out);
    for (const auto& f : result.files) out << "wrote " << (std::filesystem::path(cfg.output) / f.name).string() << "\n";
    out << "wrote " << (std::filesystem::path(cfg.output) / manifest.name).string() << "\n";
    const bool all_passed =
        std::all_of(result.checks.begin(), result.checks.end(), [](const Check& c) { return c.passed; });
    return all_passed ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    err << "nh-sta " << command << ": " << e.what() << "\n";
    return exit_status_for(e.kind());
  } catch (const std::exception& e) {
    err << "nh-sta " << command << ": " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace nhsta::experiment
