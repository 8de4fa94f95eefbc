#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhsta/error.hpp"
#include "nhsta/finite_difference.hpp"
#include "nhsta/linalg.hpp"
#include "nhsta/time_grid.hpp"

namespace nhsta {

using RealFunction = std::function<double(double)>;

enum class DerivativeSource { Analytic, Numeric };

/// Control values and their time derivatives at one instant (units 1/tau and 1/tau^2).
struct Controls {
  double omega_r = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double d_omega_r = 0.0;
  double d_delta = 0.0;
  double d_gamma = 0.0;
};

/// Rabi frequency, detuning and decay rate as functions of time. Derivative
/// functions are optional; when any is missing all derivatives fall back to
/// symmetric differences with `numeric_step`.
struct PulseSpec {
  RealFunction omega_r;
  RealFunction delta;
  RealFunction gamma;
  RealFunction d_omega_r;
  RealFunction d_delta;
  RealFunction d_gamma;
  double numeric_step = 1e-6;

  DerivativeSource derivative_source() const {
    return (d_omega_r && d_delta && d_gamma) ? DerivativeSource::Analytic : DerivativeSource::Numeric;
  }

  Controls at(double t) const {
    Controls c;
    c.omega_r = omega_r(t);
    c.delta = delta(t);
    c.gamma = gamma(t);
    if (derivative_source() == DerivativeSource::Analytic) {
      c.d_omega_r = d_omega_r(t);
      c.d_delta = d_delta(t);
      c.d_gamma = d_gamma(t);
    } else {
      const double h = numeric_step;
      c.d_omega_r = (omega_r(t + h) - omega_r(t - h)) / (2 * h);
      c.d_delta = (delta(t + h) - delta(t - h)) / (2 * h);
      c.d_gamma = (gamma(t + h) - gamma(t - h)) / (2 * h);
    }
    for (double v : {c.omega_r, c.delta, c.gamma, c.d_omega_r, c.d_delta, c.d_gamma}) {
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "pulse control is not finite at t=" + std::to_string(t));
    }
    if (c.gamma < 0) throw Error(ErrorKind::InvalidArgument, "decay rate must be >= 0");
    return c;
  }
};

inline constexpr double kRegimeTolerance = 1e-12;

/// Allen-Eberly pulse: Omega_R = omega0 sech(t/tau), Delta = delta0 tanh(t/tau),
/// constant gamma, on the window [t0, t_final].
struct AllenEberlyParams {
  double omega0 = 1.0;
  double delta0 = 9.0;
  double tau = 1.0;
  double gamma = 0.0;
  double t0 = -1.0;
  double t_final = 1.0;

  void validate() const {
    if (!(omega0 > 0)) throw Error(ErrorKind::InvalidArgument, "omega0 must be > 0");
    if (!(tau > 0)) throw Error(ErrorKind::InvalidArgument, "tau must be > 0");
    if (!(gamma >= 0)) throw Error(ErrorKind::InvalidArgument, "gamma must be >= 0");
    if (!std::isfinite(delta0)) throw Error(ErrorKind::InvalidArgument, "delta0 must be finite");
    if (!(t0 < t_final)) throw Error(ErrorKind::InvalidArgument, "t0 must be < t_final");
    if (std::abs(gamma - 2 * omega0) <= kRegimeTolerance) {
      throw Error(ErrorKind::DegenerateRegime, "gamma = 2 omega0 is an exceptional point at t = 0");
    }
  }
};

inline PulseSpec allen_eberly(const AllenEberlyParams& p) {
  p.validate();
  const double o0 = p.omega0, d0 = p.delta0, tau = p.tau, g = p.gamma;
  PulseSpec pulse;
  pulse.omega_r = [=](double t) { return o0 / std::cosh(t / tau); };
  pulse.delta = [=](double t) { return d0 * std::tanh(t / tau); };
  pulse.gamma = [=](double) { return g; };
  pulse.d_omega_r = [=](double t) { return -(o0 / tau) * std::tanh(t / tau) / std::cosh(t / tau); };
  pulse.d_delta = [=](double t) {
    const double s = 1.0 / std::cosh(t / tau);
    return (d0 / tau) * s * s;
  };
  pulse.d_gamma = [](double) { return 0.0; };
  return pulse;
}

/// Piecewise-linear pulse through tabulated (t, Omega_R, Delta) samples with a
/// constant decay rate. Clamped outside the table. No analytic derivatives.
inline PulseSpec tabulated_pulse(std::vector<double> t, std::vector<double> omega_r, std::vector<double> delta,
                                 double gamma) {
  if (t.size() < 2 || omega_r.size() != t.size() || delta.size() != t.size()) {
    throw Error(ErrorKind::InvalidArgument, "tabulated pulse needs >= 2 rows of equal length");
  }
  if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end()) {
    throw Error(ErrorKind::InvalidArgument, "tabulated pulse times must be strictly increasing");
  }
  if (!(gamma >= 0)) throw Error(ErrorKind::InvalidArgument, "gamma must be >= 0");
  auto interp = [t = std::move(t)](std::vector<double> y) {
    return [t, y = std::move(y)](double x) {
      if (x <= t.front()) return y.front();
      if (x >= t.back()) return y.back();
      const auto hi = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin());
      const auto lo = hi - 1;
      const double w = (x - t[lo]) / (t[hi] - t[lo]);
      return y[lo] + w * (y[hi] - y[lo]);
    };
  };
  PulseSpec pulse;
  pulse.omega_r = interp(std::move(omega_r));
  pulse.delta = interp(std::move(delta));
  pulse.gamma = [gamma](double) { return gamma; };
  return pulse;
}

/// (1/2) [[-Delta, Omega_R], [Omega_R, Delta - i gamma]] in the bare basis |0>, |1>.
inline ComplexMatrix hamiltonian(const Controls& c) {
  return ComplexMatrix({{-0.5 * c.delta, 0.5 * c.omega_r}, {0.5 * c.omega_r, 0.5 * complex(c.delta, -c.gamma)}});
}

inline ComplexMatrix hamiltonian(const PulseSpec& pulse, double t) { return hamiltonian(pulse.at(t)); }

/// Z = -(gamma + 2 i Delta)^2 + 4 Omega_R^2, the radicand of the eigenvalues.
inline complex radicand(const Controls& c) {
  const complex a(c.gamma, 2 * c.delta);
  return -a * a + 4 * c.omega_r * c.omega_r;
}

inline complex radicand(const PulseSpec& pulse, double t) { return radicand(pulse.at(t)); }

enum class Regime { SubCritical, SuperCritical };
enum class CutConvention { SymmetricPi, ZeroToTwoPi };

inline std::string to_string(Regime r) { return r == Regime::SubCritical ? "SubCritical" : "SuperCritical"; }

/// Branch of sqrt(Z). Below critical damping the cut lies on the negative real
/// axis (argument in (-pi, pi]); above it the cut lies on the positive real
/// axis (argument in [0, 2 pi)).
struct BranchRegime {
  Regime kind = Regime::SubCritical;
  CutConvention cut = CutConvention::SymmetricPi;

  static BranchRegime of(Regime r) {
    return {r, r == Regime::SubCritical ? CutConvention::SymmetricPi : CutConvention::ZeroToTwoPi};
  }

  double argument(complex z) const {
    double eta = std::arg(z);
    if (cut == CutConvention::ZeroToTwoPi && eta < 0) eta += 2 * std::numbers::pi;
    return eta;
  }

  complex sqrt(complex z) const { return std::polar(std::sqrt(std::abs(z)), 0.5 * argument(z)); }

  bool operator==(const BranchRegime&) const = default;
};

inline BranchRegime classify_regime(double omega0, double gamma) {
  if (!(omega0 > 0)) throw Error(ErrorKind::InvalidArgument, "omega0 must be > 0");
  if (!(gamma >= 0)) throw Error(ErrorKind::InvalidArgument, "gamma must be >= 0");
  if (std::abs(gamma - 2 * omega0) <= kRegimeTolerance) {
    throw Error(ErrorKind::DegenerateRegime, "gamma = 2 omega0");
  }
  return BranchRegime::of(gamma < 2 * omega0 ? Regime::SubCritical : Regime::SuperCritical);
}

/// Regime of an arbitrary pulse from its peak Rabi frequency and peak decay
/// rate over the grid.
inline BranchRegime classify_regime(const PulseSpec& pulse, const TimeGrid& grid) {
  double peak_omega = 0.0, peak_gamma = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto c = pulse.at(grid.at(k));
    peak_omega = std::max(peak_omega, c.omega_r);
    peak_gamma = std::max(peak_gamma, c.gamma);
  }
  return classify_regime(peak_omega, peak_gamma);
}

/// E_pm = (1/4)(-i gamma pm sqrt(Z)) with sqrt(Z) on the regime's branch.
inline std::pair<complex, complex> eigenvalues(const Controls& c, const BranchRegime& regime,
                                               double degeneracy_threshold = 1e-8) {
  const complex root = regime.sqrt(radicand(c));
  if (0.5 * std::abs(root) <= degeneracy_threshold) {
    throw Error(ErrorKind::DegenerateRegime, "eigenvalues coincide");
  }
  const complex base(0.0, -0.25 * c.gamma);
  return {base + 0.25 * root, base - 0.25 * root};
}

inline std::pair<complex, complex> eigenvalues(const PulseSpec& pulse, double t, const BranchRegime& regime,
                                               double degeneracy_threshold = 1e-8) {
  return eigenvalues(pulse.at(t), regime, degeneracy_threshold);
}

/// Eigenvalue samples with sqrt(Z) on the declared cut; a step whose
/// declared-cut root is farther from the previous root than its negative is
/// a BranchJump.
struct EigenvalueTrack {
  std::vector<complex> plus;
  std::vector<complex> minus;
};

inline EigenvalueTrack eigenvalue_path(const PulseSpec& pulse, const TimeGrid& grid, const BranchRegime& regime) {
  EigenvalueTrack out;
  complex prev_root{};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto c = pulse.at(grid.at(k));
    const complex root = regime.sqrt(radicand(c));
    if (k > 0 && std::abs(root - prev_root) > std::abs(-root - prev_root)) {
      throw Error(ErrorKind::BranchJump, "sqrt(Z) leaves the declared branch at grid index " + std::to_string(k));
    }
    prev_root = root;
    const auto [ep, em] = eigenvalues(c, regime);
    out.plus.push_back(ep);
    out.minus.push_back(em);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mixing angle.
//
// With N = i gamma/2 - Delta the traceless part of H0 is
// (rho/2)[[cos th, sin th], [sin th, -cos th]], N = rho cos th,
// Omega_R = rho sin th, so tan th = Omega_R / (i gamma/2 - Delta) and
// [cos th/2, sin th/2] is exactly the eigenvector with E_+ = -i gamma/4 + rho/2.
// Shifting th by pi swaps the + and - labels, by 2 pi only flips signs.
// ---------------------------------------------------------------------------

inline constexpr double kTanPoleThreshold = 1e-14;

inline complex mixing_denominator(const Controls& c) { return complex(-c.delta, 0.5 * c.gamma); }

/// Solution of tan th = Omega_R / N with Re th in (-pi/2, pi/2].
inline complex principal_mixing_angle(const Controls& c) {
  const complex n = mixing_denominator(c);
  const complex rho2 = n * n + c.omega_r * c.omega_r;
  if (std::abs(rho2) < kTanPoleThreshold) throw Error(ErrorKind::TanPole, "N^2 + Omega_R^2 vanishes");
  const complex rho = std::sqrt(rho2);
  complex theta = -I * std::log((n + I * c.omega_r) / rho);
  const double pi = std::numbers::pi;
  theta -= pi * std::round(theta.real() / pi);
  if (theta.real() <= -pi / 2) theta += pi;
  return theta;
}

/// d theta/dt = (Omega_R' N - Omega_R N') / (N^2 + Omega_R^2).
inline complex mixing_angle_rate(const Controls& c) {
  const complex n = mixing_denominator(c);
  const complex dn(-c.d_delta, 0.5 * c.d_gamma);
  const complex denom = n * n + c.omega_r * c.omega_r;
  if (std::abs(denom) < kTanPoleThreshold) throw Error(ErrorKind::TanPole, "N^2 + Omega_R^2 vanishes");
  return (c.d_omega_r * n - c.omega_r * dn) / denom;
}

/// Representative th + m pi closest to `reference`.
inline complex mixing_angle_near(const Controls& c, complex reference) {
  const complex theta = principal_mixing_angle(c);
  const double pi = std::numbers::pi;
  return theta + pi * std::round((reference - theta).real() / pi);
}

/// E_pm matched to the labels fixed by theta: -i gamma/4 pm rho/2 with
/// rho = N cos th + Omega_R sin th.
inline std::pair<complex, complex> matched_eigenvalues(const Controls& c, complex theta) {
  const complex rho = mixing_denominator(c) * std::cos(theta) + c.omega_r * std::sin(theta);
  const complex base(0.0, -0.25 * c.gamma);
  return {base + 0.5 * rho, base - 0.5 * rho};
}

struct MixingAnglePath {
  TimeGrid grid;
  std::vector<complex> theta;
  std::vector<complex> dtheta;
  BranchRegime regime;
  DerivativeSource derivative_source = DerivativeSource::Analytic;
};

/// Branch-continuous mixing angle on the grid. theta(t0) is the principal
/// representative; each later sample takes the representative closest to its
/// predecessor and must land within pi/2 of it.
inline MixingAnglePath mixing_angle_path(const PulseSpec& pulse, const TimeGrid& grid, const BranchRegime& regime) {
  MixingAnglePath path{grid, {}, {}, regime, pulse.derivative_source()};
  path.theta.reserve(grid.size());
  path.dtheta.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto c = pulse.at(grid.at(k));
    complex theta = principal_mixing_angle(c);
    if (k > 0) {
      theta = mixing_angle_near(c, path.theta.back());
      if (std::abs(theta - path.theta.back()) >= std::numbers::pi / 2) {
        throw Error(ErrorKind::BranchJump, "mixing angle jumps by >= pi/2 at grid index " + std::to_string(k));
      }
    }
    path.theta.push_back(theta);
    if (path.derivative_source == DerivativeSource::Analytic) path.dtheta.push_back(mixing_angle_rate(c));
  }
  if (path.derivative_source == DerivativeSource::Numeric) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      path.dtheta.push_back(
          grid_derivative([&](std::size_t j) { return path.theta[j]; }, k, grid.size(), grid.step()));
    }
  }
  return path;
}

inline MixingAnglePath mixing_angle_path(const PulseSpec& pulse, const TimeGrid& grid) {
  return mixing_angle_path(pulse, grid, classify_regime(pulse, grid));
}

/// Matched eigenvalue samples along a mixing-angle path.
inline EigenvalueTrack matched_eigenvalue_path(const PulseSpec& pulse, const MixingAnglePath& path) {
  EigenvalueTrack out;
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const auto [ep, em] = matched_eigenvalues(pulse.at(path.grid.at(k)), path.theta[k]);
    out.plus.push_back(ep);
    out.minus.push_back(em);
  }
  return out;
}

/// Right eigenvectors |+>, |-> and their partners |+~>, |-~> (stored as kets).
struct TwoLevelEigenvectors {
  Vector plus;
  Vector minus;
  Vector plus_left;
  Vector minus_left;
};

inline TwoLevelEigenvectors eigenvectors(complex theta) {
  if (!is_finite(theta)) throw Error(ErrorKind::NonFinite, "mixing angle is not finite");
  const complex c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const complex cl = std::conj(c), sl = std::conj(s);  // cos(th*/2) = cos(th/2)^*
  TwoLevelEigenvectors v{Vector(2), Vector(2), Vector(2), Vector(2)};
  v.plus << c, s;
  v.minus << s, -c;
  v.plus_left << cl, sl;
  v.minus_left << sl, -cl;
  return v;
}

}  // namespace nhsta
