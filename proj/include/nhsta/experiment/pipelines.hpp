#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "nhsta/biorthogonal.hpp"
#include "nhsta/error.hpp"
#include "nhsta/experiment/config.hpp"
#include "nhsta/experiment/output.hpp"
#include "nhsta/gauge.hpp"
#include "nhsta/propagator.hpp"
#include "nhsta/shortcut.hpp"
#include "nhsta/supplement.hpp"
#include "nhsta/two_level.hpp"

namespace nhsta::experiment {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunRecord {
  std::string label;
  double gamma = 0.0;
  std::string status = "ok";
  double convergence = kNaN;  // NaN when the command does not propagate
  double wall_seconds = 0.0;
};

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

struct CommandResult {
  std::vector<WrittenFile> files;
  std::vector<RunRecord> runs;
  std::vector<Check> checks;
};

inline std::vector<double> gammas_or(const ExperimentConfig& cfg, std::vector<double> fallback) {
  return cfg.gamma_list.empty() ? fallback : cfg.gamma_list;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/// One propagated protocol run with its derived amplitudes and metrics.
struct ShortcutRun {
  ShortcutProtocol protocol;
  InitialCondition initial;
  StateTrajectory trajectory;
  AmplitudeTrajectory amplitudes;
  double convergence = kNaN;
  double max_residual = kNaN;
  double wall_seconds = 0.0;
};

/// Largest algebraic residual of the coupling the protocol is meant to
/// cancel. The bare run leaves it at |d theta/dt|; the naive supplement
/// cancels both couplings by construction.
inline double protocol_residual(const ShortcutProtocol& sp) {
  if (sp.coefficients()) return nullification_residual(sp.path(), *sp.coefficients()).max_abs_residual;
  if (sp.protocol() == Protocol::NaiveCD) return 0.0;
  double r = 0.0;
  for (const auto& d : sp.path().dtheta) r = std::max(r, std::abs(d));
  return r;
}

inline ShortcutRun run_shortcut(const ExperimentConfig& cfg, double gamma, Protocol protocol,
                                InitialCondition initial, bool certify = true) {
  const auto start = std::chrono::steady_clock::now();
  const auto grid = cfg.grid();
  ShortcutProtocol sp(make_pulse(cfg, gamma), grid, protocol);
  const Vector psi0 = initial_state(initial, sp.path(), sp.gauges());
  const HamiltonianFunction h = [&sp](double t) { return sp.h_total(t); };
  auto traj = integrate(h, psi0, grid, initial);
  auto amps = amplitudes(traj, sp.path(), sp.gauges());
  const double conv = certify ? convergence_check(h, psi0, grid) : kNaN;
  const double residual = protocol_residual(sp);
  return {std::move(sp), initial, std::move(traj), std::move(amps), conv, residual, detail::seconds_since(start)};
}

inline std::string run_label(double gamma, Protocol p, InitialCondition c) {
  return "gamma=" + gamma_tag(gamma) + " policy=" + to_string(p) + " initial_state=" + to_string(c);
}

// ---------------------------------------------------------------------------
// Figure commands.
// ---------------------------------------------------------------------------

inline CommandResult cmd_figure1(const ExperimentConfig& cfg) {
  CommandResult result;
  const auto grid = cfg.grid();
  for (double gamma : gammas_or(cfg, {0.3, 3.0})) {
    const auto start = std::chrono::steady_clock::now();
    const auto pulse = make_pulse(cfg, gamma);
    const auto regime = classify_regime(pulse, grid);
    Table t{{"t", "re_z", "im_z", "eta", "regime"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const complex z = radicand(pulse, grid.at(k));
      t.add({grid.at(k), z.real(), z.imag(), regime.argument(z), to_string(regime.kind)});
    }
    result.files.push_back(write_table(cfg.output, "figure1_gamma_" + gamma_tag(gamma), t, cfg.format));
    result.runs.push_back({"gamma=" + gamma_tag(gamma), gamma, "ok", kNaN, detail::seconds_since(start)});
  }
  return result;
}

inline CommandResult cmd_figure2(const ExperimentConfig& cfg) {
  CommandResult result;
  const auto grid = cfg.grid();
  for (double gamma : gammas_or(cfg, {0.3, 3.0})) {
    const auto start = std::chrono::steady_clock::now();
    const auto path = mixing_angle_path(make_pulse(cfg, gamma), grid);
    Table t{{"t", "re_theta", "im_theta"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) t.add({grid.at(k), path.theta[k].real(), path.theta[k].imag()});
    result.files.push_back(write_table(cfg.output, "figure2_gamma_" + gamma_tag(gamma), t, cfg.format));
    result.runs.push_back({"gamma=" + gamma_tag(gamma), gamma, "ok", kNaN, detail::seconds_since(start)});
  }
  return result;
}

inline CommandResult cmd_figure3(const ExperimentConfig& cfg) {
  CommandResult result;
  const auto protocol = cfg.policies.front();
  const auto initial = cfg.initial_states.front();
  for (double gamma : gammas_or(cfg, {0.1, 0.3, 1.0})) {
    const auto run = run_shortcut(cfg, gamma, protocol, initial);
    const auto& a = run.amplitudes;
    Table t{{"t", "c_plus_sq", "c_minus_sq", "g_plus_sq", "g_minus_sq"}, {}};
    for (std::size_t k = 0; k < a.grid.size(); ++k) {
      t.add({a.grid.at(k), std::norm(a.c_plus[k]), std::norm(a.c_minus[k]), a.pop_phi_plus[k], a.pop_phi_minus[k]});
    }
    result.files.push_back(write_table(cfg.output, "figure3_gamma_" + gamma_tag(gamma), t, cfg.format));
    result.runs.push_back({run_label(gamma, protocol, initial), gamma, "ok", run.convergence, run.wall_seconds});
  }
  return result;
}

inline CommandResult cmd_figure4(const ExperimentConfig& cfg) {
  CommandResult result;
  const auto protocol = cfg.policies.front();
  const auto initial = cfg.initial_states.front();
  for (double gamma : gammas_or(cfg, {1.0})) {
    const auto run = run_shortcut(cfg, gamma, protocol, initial);
    const auto& a = run.amplitudes;
    Table t{{"t", "p0", "p1", "p_sum", "p0_renorm", "p1_renorm"}, {}};
    for (std::size_t k = 0; k < a.grid.size(); ++k) {
      t.add({a.grid.at(k), a.pop_bare_0[k], a.pop_bare_1[k], a.pop_bare_0[k] + a.pop_bare_1[k],
             a.pop_bare_0_renormalized[k], a.pop_bare_1_renormalized[k]});
    }
    result.files.push_back(write_table(cfg.output, "figure4_gamma_" + gamma_tag(gamma), t, cfg.format));
    result.runs.push_back({run_label(gamma, protocol, initial), gamma, "ok", run.convergence, run.wall_seconds});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Sweep.
// ---------------------------------------------------------------------------

struct SweepRow {
  double gamma = 0.0;
  Protocol protocol = Protocol::Hermitian;
  InitialCondition initial = InitialCondition::EigenPlus;
  std::string regime = "-";
  std::string status = "ok";
  double g_plus_sq_final = kNaN;
  double p0_renorm_final = kNaN;
  double max_residual = kNaN;
  double convergence = kNaN;
  double wall_seconds = 0.0;
};

/// Runs `count` independent jobs on up to `threads` workers; job i writes
/// only slot i, so results do not depend on scheduling.
template <class Job>
void parallel_for(std::size_t count, std::size_t threads, Job&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
}

inline SweepRow sweep_one(const ExperimentConfig& cfg, double gamma, Protocol protocol, InitialCondition initial) {
  SweepRow row{gamma, protocol, initial};
  const auto start = std::chrono::steady_clock::now();
  try {
    row.regime = to_string(classify_regime(make_pulse(cfg, gamma), cfg.grid()).kind);
    const auto run = run_shortcut(cfg, gamma, protocol, initial);
    row.g_plus_sq_final = run.amplitudes.pop_phi_plus.back();
    row.p0_renorm_final = run.amplitudes.pop_bare_0_renormalized.back();
    row.max_residual = run.max_residual;
    row.convergence = run.convergence;
  } catch (const Error& e) {
    if (!is_numerical(e.kind())) throw;
    row.status = to_string(e.kind());
  }
  row.wall_seconds = detail::seconds_since(start);
  return row;
}

inline CommandResult cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.gamma_list.empty()) throw Error(ErrorKind::Config, "sweep needs a non-empty gamma list");
  const auto policies = cfg.policies_set ? cfg.policies
                                         : std::vector<Protocol>{Protocol::Bare, Protocol::NaiveCD,
                                                                 Protocol::Hermitian, Protocol::ZeroCoupling};
  const auto initials = cfg.initial_states_set
                            ? cfg.initial_states
                            : std::vector<InitialCondition>{InitialCondition::EigenPlus, InitialCondition::BareGround};
  std::vector<SweepRow> rows;
  for (double g : cfg.gamma_list) {
    for (auto p : policies) {
      for (auto c : initials) rows.push_back({g, p, c});
    }
  }
  parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    rows[i] = sweep_one(cfg, rows[i].gamma, rows[i].protocol, rows[i].initial);
  });

  CommandResult result;
  Table t{{"gamma", "policy", "initial_state", "regime", "status", "g_plus_sq_final", "p0_renorm_final",
           "max_residual", "convergence"},
          {}};
  for (const auto& r : rows) {
    t.add({r.gamma, to_string(r.protocol), to_string(r.initial), r.regime, r.status, r.g_plus_sq_final,
           r.p0_renorm_final, r.max_residual, r.convergence});
    result.runs.push_back({run_label(r.gamma, r.protocol, r.initial), r.gamma, r.status, r.convergence,
                           r.wall_seconds});
  }
  result.files.push_back(write_table(cfg.output, "sweep", t, cfg.format));
  return result;
}

// ---------------------------------------------------------------------------
// Verification suite.
// ---------------------------------------------------------------------------

namespace detail {

inline Check at_most(std::string name, double value, double limit) {
  return {std::move(name), value, limit, std::isfinite(value) && value <= limit};
}

/// Biorthogonality, completeness and round-trip error over a seeded corpus
/// of random matrices with entries in the complex unit disc.
struct CorpusErrors {
  double overlap = 0.0;
  double completeness = 0.0;
  double round_trip = 0.0;
};

inline CorpusErrors random_corpus_errors(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.0, 1.0), angle(0.0, 2 * std::numbers::pi);
  std::uniform_int_distribution<int> dim(2, 4);
  CorpusErrors out;
  for (std::size_t i = 0; i < count; ++i) {
    const int n = dim(rng);
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) m(r, c) = std::polar(std::sqrt(radius(rng)), angle(rng));
    }
    const ComplexMatrix h(m);
    const auto sys = decompose(h);
    const auto report = check_biorthogonality(sys);
    out.overlap = std::max(out.overlap, report.overlap_error);
    out.completeness = std::max(out.completeness, report.completeness_error);
    out.round_trip = std::max(out.round_trip, max_abs_diff(reconstruct(sys), h));
  }
  return out;
}

/// Max distance between the branch-cut eigenvalues and the theta-matched
/// ones, allowing the two labellings to differ by a swap.
inline double eigenvalue_branch_gap(const PulseSpec& pulse, const MixingAnglePath& path) {
  const auto cut = eigenvalue_path(pulse, path.grid, path.regime);
  const auto matched = matched_eigenvalue_path(pulse, path);
  double gap = 0.0;
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const double same = std::max(std::abs(cut.plus[k] - matched.plus[k]), std::abs(cut.minus[k] - matched.minus[k]));
    const double swapped =
        std::max(std::abs(cut.plus[k] - matched.minus[k]), std::abs(cut.minus[k] - matched.plus[k]));
    gap = std::max(gap, std::min(same, swapped));
  }
  return gap;
}

inline double inverse_frame_error(const MixingAnglePath& path, const GaugeFunctions& gauges) {
  double err = 0.0;
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const auto f = rotation(path, gauges, k);
    err = std::max(err, max_abs_diff(f.r_tilde.adjoint() * f.r, ComplexMatrix::identity(2)));
  }
  return err;
}

}  // namespace detail

inline std::vector<Check> verify_gamma(const ExperimentConfig& cfg, double gamma) {
  using detail::at_most;
  const std::string tag = "gamma=" + gamma_tag(gamma) + " ";
  std::vector<Check> checks;
  const auto run = run_shortcut(cfg, gamma, Protocol::Hermitian, InitialCondition::EigenPlus);
  const auto& sp = run.protocol;
  const auto& coeffs = *sp.coefficients();
  const auto& a = run.amplitudes;

  checks.push_back(at_most(tag + "eigenvalue branch agreement", detail::eigenvalue_branch_gap(sp.pulse(), sp.path()),
                           1e-10));
  checks.push_back(at_most(tag + "inverse frame identity", detail::inverse_frame_error(sp.path(), sp.gauges()), 1e-12));
  checks.push_back(at_most(tag + "algebraic nullification residual", run.max_residual, 1e-10));
  checks.push_back(at_most(tag + "frame-level blocked coupling",
                           frame_nullification(sp.pulse(), sp.path(), sp.gauges(), coeffs).max_blocked, 1e-6));

  double g_minus = 0.0, g_plus_dev = 0.0, closed_dev = 0.0;
  const auto closed = closed_form_gplus(sp.energies().plus, sp.gauges(), coeffs, sp.path());
  for (std::size_t k = 0; k < a.grid.size(); ++k) {
    g_minus = std::max(g_minus, std::abs(a.g_minus[k]));
    g_plus_dev = std::max(g_plus_dev, std::abs(a.pop_phi_plus[k] - 1.0));
    closed_dev = std::max(closed_dev, std::abs(closed[k] - a.g_plus[k]));
  }
  checks.push_back(at_most(tag + "max |g-|", g_minus, 1e-5));
  checks.push_back(at_most(tag + "max ||g+|^2 - 1|", g_plus_dev, 0.05));
  checks.push_back(at_most(tag + "closed-form g+ vs propagated g+", closed_dev, 1e-5));
  checks.push_back(at_most(tag + "step-halving convergence", run.convergence, cfg.convergence_tolerance));
  return checks;
}

inline CommandResult cmd_verify(const ExperimentConfig& cfg) {
  using detail::at_most;
  CommandResult result;
  const auto corpus = detail::random_corpus_errors(200, 20240601);
  result.checks.push_back(at_most("random corpus biorthogonality", corpus.overlap, 1e-10));
  result.checks.push_back(at_most("random corpus completeness", corpus.completeness, 1e-10));
  result.checks.push_back(at_most("random corpus spectral round trip", corpus.round_trip, 1e-10));
  for (double gamma : gammas_or(cfg, {0.1, 0.3, 1.0})) {
    const auto start = std::chrono::steady_clock::now();
    auto checks = verify_gamma(cfg, gamma);
    const bool ok = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    const auto conv = std::find_if(checks.begin(), checks.end(),
                                   [](const Check& c) { return c.name.ends_with("step-halving convergence"); });
    result.runs.push_back({"gamma=" + gamma_tag(gamma), gamma, ok ? "ok" : "failed",
                           conv == checks.end() ? kNaN : conv->value, detail::seconds_since(start)});
    result.checks.insert(result.checks.end(), checks.begin(), checks.end());
  }
  return result;
}

}  // namespace nhsta::experiment
