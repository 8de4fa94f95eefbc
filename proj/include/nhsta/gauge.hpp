#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "nhsta/error.hpp"
#include "nhsta/linalg.hpp"
#include "nhsta/supplement.hpp"
#include "nhsta/time_grid.hpp"
#include "nhsta/two_level.hpp"

namespace nhsta {

enum class GaugeKind { Simple, ShortcutMatched };

/// Eigenvector rescalings f_pm(t) with |phi_pm> = f_pm |pm>. `rate_*` holds
/// d_t f / f at each grid point, taken from the defining integrand rather
/// than from differentiating the samples.
struct GaugeFunctions {
  TimeGrid grid;
  std::vector<complex> f_plus;
  std::vector<complex> f_minus;
  std::vector<complex> rate_plus;
  std::vector<complex> rate_minus;
  RealFunction h_plus;
  RealFunction h_minus;
  GaugeKind kind = GaugeKind::Simple;
};

/// Running trapezoidal integral from t0; result[0] = 0.
inline std::vector<complex> cumulative_trapezoid(std::span<const complex> y, const TimeGrid& grid) {
  if (y.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "samples do not match the grid");
  std::vector<complex> out(y.size());
  out[0] = 0.0;
  for (std::size_t k = 1; k < y.size(); ++k) {
    out[k] = out[k - 1] + 0.5 * (grid.at(k) - grid.at(k - 1)) * (y[k] + y[k - 1]);
  }
  return out;
}

namespace detail {

inline std::vector<complex> exp_of_integral(std::span<const complex> rate, const TimeGrid& grid) {
  for (const auto& r : rate) {
    if (!is_finite(r)) throw Error(ErrorKind::NonFinite, "gauge integrand is not finite");
  }
  auto integral = cumulative_trapezoid(rate, grid);
  for (auto& v : integral) v = std::exp(v);
  return integral;
}

inline std::vector<complex> simple_rate(std::span<const complex> energies, const RealFunction& h,
                                        const TimeGrid& grid) {
  if (energies.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "eigenvalue samples do not match grid");
  std::vector<complex> rate(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    rate[k] = complex(energies[k].imag(), h ? h(grid.at(k)) : 0.0);
  }
  return rate;
}

}  // namespace detail

/// f_n = exp( int_{t0}^t Im[E_n] + i h_n dt' ); h_n defaults to 0.
inline GaugeFunctions gauge_simple(std::span<const complex> e_plus, std::span<const complex> e_minus,
                                   const TimeGrid& grid, RealFunction h_plus = {}, RealFunction h_minus = {}) {
  GaugeFunctions g{grid, {}, {}, {}, {}, h_plus, h_minus, GaugeKind::Simple};
  g.rate_plus = detail::simple_rate(e_plus, h_plus, grid);
  g.rate_minus = detail::simple_rate(e_minus, h_minus, grid);
  g.f_plus = detail::exp_of_integral(g.rate_plus, grid);
  g.f_minus = detail::exp_of_integral(g.rate_minus, grid);
  return g;
}

/// d_t f+ / f+ that keeps |g+| constant under H0 + H1: the imaginary part of
/// E+ plus the (1,1) entry of the adiabatic-frame supplement,
/// (delta+ cos^2(th/2) + delta- sin^2(th/2) + Re Omega sin th) / 2.
inline double shortcut_rate(complex e_plus, complex theta, const SupplementPoint& p) {
  const complex c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const complex diag = 0.5 * (p.delta_plus * c * c + p.delta_minus * s * s + p.omega.real() * std::sin(theta));
  return (e_plus + diag).imag();
}

/// f+ real positive with |g+(t)| = 1 along the shortcut built from `coeffs`;
/// f- follows the simple rule with h- = 0.
inline GaugeFunctions gauge_shortcut(std::span<const complex> e_plus, std::span<const complex> e_minus,
                                     const MixingAnglePath& path, const SupplementCoefficients& coeffs) {
  require_same_grid(path.grid, coeffs.grid, "theta path and supplement grids differ");
  if (e_plus.size() != path.grid.size()) throw Error(ErrorKind::GridMismatch, "eigenvalue samples do not match grid");
  GaugeFunctions g{path.grid, {}, {}, {}, {}, {}, {}, GaugeKind::ShortcutMatched};
  g.rate_plus.resize(path.grid.size());
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    g.rate_plus[k] = shortcut_rate(e_plus[k], path.theta[k], coeffs.at(k));
  }
  g.rate_minus = detail::simple_rate(e_minus, {}, path.grid);
  g.f_plus = detail::exp_of_integral(g.rate_plus, path.grid);
  g.f_minus = detail::exp_of_integral(g.rate_minus, path.grid);
  return g;
}

/// R maps adiabatic-frame amplitudes (g+, g-) to the bare basis; R~^dag maps
/// back, R~^dag R = 1.
struct FrameRotation {
  ComplexMatrix r;
  ComplexMatrix r_tilde;
};

inline FrameRotation rotation(complex theta, complex f_plus, complex f_minus) {
  if (f_plus == 0.0 || f_minus == 0.0) throw Error(ErrorKind::ZeroGauge, "gauge function vanishes");
  const complex c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const complex ct = std::conj(c), st = std::conj(s);
  const complex ip = 1.0 / std::conj(f_plus), im = 1.0 / std::conj(f_minus);
  return {ComplexMatrix({{f_plus * c, f_minus * s}, {f_plus * s, -f_minus * c}}),
          ComplexMatrix({{ip * ct, im * st}, {ip * st, -im * ct}})};
}

inline FrameRotation rotation(const MixingAnglePath& path, const GaugeFunctions& gauges, std::size_t k) {
  if (k >= path.grid.size()) throw Error(ErrorKind::IndexOutOfRange, "grid index " + std::to_string(k));
  return rotation(path.theta[k], gauges.f_plus[k], gauges.f_minus[k]);
}

/// diag(E+, E-) - i [[f+'/f+, th' f-/(2 f+)], [-th' f+/(2 f-), f-'/f-]]
inline ComplexMatrix adiabatic_frame_h0(const PulseSpec& pulse, const MixingAnglePath& path,
                                        const GaugeFunctions& gauges, std::size_t k) {
  require_same_grid(path.grid, gauges.grid, "theta path and gauge grids differ");
  if (k >= path.grid.size()) throw Error(ErrorKind::IndexOutOfRange, "grid index " + std::to_string(k));
  const complex fp = gauges.f_plus[k], fm = gauges.f_minus[k];
  if (fp == 0.0 || fm == 0.0) throw Error(ErrorKind::ZeroGauge, "gauge function vanishes");
  const auto [ep, em] = matched_eigenvalues(pulse.at(path.grid.at(k)), path.theta[k]);
  const complex dth = path.dtheta[k];
  return ComplexMatrix({{ep - I * gauges.rate_plus[k], -I * dth * fm / (2.0 * fp)},
                        {I * dth * fp / (2.0 * fm), em - I * gauges.rate_minus[k]}});
}

}  // namespace nhsta
