#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nhsta/error.hpp"
#include "nhsta/gauge.hpp"
#include "nhsta/linalg.hpp"
#include "nhsta/time_grid.hpp"
#include "nhsta/two_level.hpp"

namespace nhsta {

using HamiltonianFunction = std::function<ComplexMatrix(double)>;

enum class InitialCondition { BareGround, EigenPlus, Custom };

inline std::string to_string(InitialCondition c) {
  switch (c) {
    case InitialCondition::BareGround: return "bare_ground";
    case InitialCondition::EigenPlus: return "eigen_plus";
    case InitialCondition::Custom: return "custom";
  }
  return "?";
}

inline std::optional<InitialCondition> parse_initial_condition(const std::string& name) {
  if (name == "bare_ground") return InitialCondition::BareGround;
  if (name == "eigen_plus") return InitialCondition::EigenPlus;
  return std::nullopt;
}

/// |0> or |phi+(t0)> = f+(t0) |+(t0)>.
inline Vector initial_state(InitialCondition which, const MixingAnglePath& path, const GaugeFunctions& gauges) {
  Vector psi(2);
  switch (which) {
    case InitialCondition::BareGround: psi << 1.0, 0.0; return psi;
    case InitialCondition::EigenPlus: return gauges.f_plus.front() * eigenvectors(path.theta.front()).plus;
    case InitialCondition::Custom: break;
  }
  throw Error(ErrorKind::InvalidArgument, "custom initial states must be given explicitly");
}

struct StateTrajectory {
  TimeGrid grid;
  std::vector<Vector> psi;
  InitialCondition initial_condition = InitialCondition::Custom;
};

/// Classical fixed-step RK4 for i d_t psi = H(t) psi on the grid. H is
/// evaluated at the grid points and at the step midpoints.
inline StateTrajectory integrate(const HamiltonianFunction& h, const Vector& psi0, const TimeGrid& grid,
                                 InitialCondition tag = InitialCondition::Custom) {
  if (!psi0.allFinite()) throw Error(ErrorKind::NonFinite, "initial state is not finite");
  StateTrajectory traj{grid, {}, tag};
  traj.psi.reserve(grid.size());
  traj.psi.push_back(psi0);
  auto rhs = [&](double t, const Vector& v) -> Vector { return -I * h(t).apply(v); };
  Vector psi = psi0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = grid.at(k), dt = grid.at(k + 1) - t, mid = t + 0.5 * dt;
    const Vector k1 = rhs(t, psi);
    const Vector k2 = rhs(mid, psi + (0.5 * dt) * k1);
    const Vector k3 = rhs(mid, psi + (0.5 * dt) * k2);
    const Vector k4 = rhs(grid.at(k + 1), psi + dt * k3);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!psi.allFinite()) {
      throw Error(ErrorKind::NonFinite, "state is not finite after step " + std::to_string(k + 1));
    }
    traj.psi.push_back(psi);
  }
  return traj;
}

/// Biorthogonal and gauge-corrected amplitudes plus bare populations.
struct AmplitudeTrajectory {
  TimeGrid grid;
  std::vector<complex> c_plus, c_minus;
  std::vector<complex> g_plus, g_minus;
  std::vector<double> pop_phi_plus, pop_phi_minus;
  std::vector<double> pop_bare_0, pop_bare_1;
  std::vector<double> pop_bare_0_renormalized, pop_bare_1_renormalized;
};

inline AmplitudeTrajectory amplitudes(const StateTrajectory& traj, const MixingAnglePath& path,
                                      const GaugeFunctions& gauges) {
  require_same_grid(traj.grid, path.grid, "trajectory and theta path grids differ");
  require_same_grid(traj.grid, gauges.grid, "trajectory and gauge grids differ");
  AmplitudeTrajectory out{traj.grid, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const auto v = eigenvectors(path.theta[k]);
    const Vector& psi = traj.psi[k];
    const complex fp = gauges.f_plus[k], fm = gauges.f_minus[k];
    if (fp == 0.0 || fm == 0.0) throw Error(ErrorKind::ZeroGauge, "gauge function vanishes");
    const complex cp = v.plus_left.dot(psi), cm = v.minus_left.dot(psi);
    out.c_plus.push_back(cp);
    out.c_minus.push_back(cm);
    out.g_plus.push_back(cp / fp);
    out.g_minus.push_back(cm / fm);
    out.pop_phi_plus.push_back(std::norm(cp / fp));
    out.pop_phi_minus.push_back(std::norm(cm / fm));
    const double p0 = std::norm(psi(0)), p1 = std::norm(psi(1));
    out.pop_bare_0.push_back(p0);
    out.pop_bare_1.push_back(p1);
    const double total = p0 + p1;
    out.pop_bare_0_renormalized.push_back(total > 0 ? p0 / total : 0.0);
    out.pop_bare_1_renormalized.push_back(total > 0 ? p1 / total : 0.0);
  }
  return out;
}

/// Largest |psi_grid(t_k) - psi_half(t_k)| over the points both grids share,
/// where psi_half is integrated with half the step.
inline double convergence_check(const HamiltonianFunction& h, const Vector& psi0, const TimeGrid& grid) {
  if (grid.steps() % 2 != 0) throw Error(ErrorKind::InvalidArgument, "convergence check needs an even step count");
  const auto coarse = integrate(h, psi0, grid);
  const auto fine = integrate(h, psi0, grid.refined());
  double diff = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    diff = std::max(diff, (coarse.psi[k] - fine.psi[2 * k]).cwiseAbs().maxCoeff());
  }
  return diff;
}

}  // namespace nhsta
