#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nhsta/error.hpp"
#include "nhsta/finite_difference.hpp"
#include "nhsta/gauge.hpp"
#include "nhsta/linalg.hpp"
#include "nhsta/supplement.hpp"
#include "nhsta/time_grid.hpp"
#include "nhsta/two_level.hpp"

namespace nhsta {

using ComplexFunction = std::function<complex(double)>;

/// Bare-basis image R H1^e R~^dag of the supplement that cancels both
/// adiabatic-frame couplings, H1^e = (i/2)[[e+, th' f-/f+], [-th' f+/f-, e-]]:
///   (i/2) [[e+ c^2 + e- s^2, (e+ - e-) sin th/2 - th'],
///          [(e+ - e-) sin th/2 + th', e+ s^2 + e- c^2]]
/// with c = cos(th/2), s = sin(th/2). The gauge factors cancel.
inline ComplexMatrix naive_cd_point(complex theta, complex dtheta, complex eps_plus = 0.0, complex eps_minus = 0.0) {
  const complex c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const complex cross = (eps_plus - eps_minus) * std::sin(theta) / 2.0;
  const complex h = 0.5 * I;
  return ComplexMatrix({{h * (eps_plus * c * c + eps_minus * s * s), h * (cross - dtheta)},
                        {h * (cross + dtheta), h * (eps_plus * s * s + eps_minus * c * c)}});
}

inline std::vector<ComplexMatrix> naive_cd(const MixingAnglePath& path, const GaugeFunctions& gauges,
                                           const ComplexFunction& eps_plus = {},
                                           const ComplexFunction& eps_minus = {}) {
  require_same_grid(path.grid, gauges.grid, "theta path and gauge grids differ");
  std::vector<ComplexMatrix> out;
  out.reserve(path.grid.size());
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const double t = path.grid.at(k);
    out.push_back(naive_cd_point(path.theta[k], path.dtheta[k], eps_plus ? eps_plus(t) : 0.0,
                                 eps_minus ? eps_minus(t) : 0.0));
  }
  return out;
}

inline constexpr double kSplitTolerance = 1e-12;

/// g+(t) = exp(-i int_{t0}^t E+ - i f+'/f+ + delta cos th / 2) for a
/// Hermitian supplement with delta+ = -delta- = delta. Starting from
/// g = (1, 0) this is exact whenever the (1,2) coupling is absent or g-
/// stays zero, which covers both blocking variants.
inline std::vector<complex> closed_form_gplus(std::span<const complex> e_plus, const GaugeFunctions& gauges,
                                              const SupplementCoefficients& coeffs, const MixingAnglePath& path) {
  require_same_grid(path.grid, gauges.grid, "theta path and gauge grids differ");
  require_same_grid(path.grid, coeffs.grid, "theta path and supplement grids differ");
  if (coeffs.policy != SupplementPolicy::HermitianRealizable) {
    throw Error(ErrorKind::PolicyMismatch, "closed form needs HermitianRealizable coefficients");
  }
  if (e_plus.size() != path.grid.size()) throw Error(ErrorKind::GridMismatch, "eigenvalue samples do not match grid");
  std::vector<complex> integrand(path.grid.size());
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const auto p = coeffs.at(k);
    if (std::abs(p.delta_plus + p.delta_minus) > kSplitTolerance * (1.0 + std::abs(p.delta_plus))) {
      throw Error(ErrorKind::PolicyMismatch, "closed form needs delta+ = -delta-");
    }
    integrand[k] = e_plus[k] - I * gauges.rate_plus[k] + 0.5 * p.delta_plus * std::cos(path.theta[k]);
  }
  auto phase = cumulative_trapezoid(integrand, path.grid);
  for (auto& v : phase) v = std::exp(-I * v);
  return phase;
}

/// Adiabatic-frame total Hamiltonian R~^dag (H0 + H1) R - i R~^dag d_t R at
/// grid index k, with d_t R from finite differences of the sampled R.
inline ComplexMatrix adiabatic_frame_total(const PulseSpec& pulse, const MixingAnglePath& path,
                                           const GaugeFunctions& gauges, const SupplementCoefficients& coeffs,
                                           std::size_t k) {
  require_same_grid(path.grid, gauges.grid, "theta path and gauge grids differ");
  require_same_grid(path.grid, coeffs.grid, "theta path and supplement grids differ");
  const auto frame = rotation(path, gauges, k);
  const Eigen::MatrixXcd dr = grid_derivative(
      [&](std::size_t j) -> Eigen::MatrixXcd { return rotation(path, gauges, j).r.values(); }, k, path.grid.size(),
      path.grid.step());
  const ComplexMatrix h = hamiltonian(pulse, path.grid.at(k)) + assemble_h1(coeffs, k);
  const auto rt = frame.r_tilde.adjoint();
  return rt * h * frame.r - I * (rt * ComplexMatrix(dr));
}

struct FrameNullification {
  double max_blocked = 0.0;  ///< largest |entry| of the coupling the supplement cancels
  double max_other = 0.0;    ///< largest |entry| of the opposite coupling
};

/// Matrix-level counterpart of nullification_residual over interior grid
/// points (both ends use lower-order one-sided differences and are skipped).
inline FrameNullification frame_nullification(const PulseSpec& pulse, const MixingAnglePath& path,
                                              const GaugeFunctions& gauges, const SupplementCoefficients& coeffs) {
  FrameNullification out;
  const bool plus_to_minus = coeffs.blocked == BlockedTransition::PlusToMinus;
  for (std::size_t k = 1; k + 1 < path.grid.size(); ++k) {
    const auto he = adiabatic_frame_total(pulse, path, gauges, coeffs, k);
    const double e12 = std::abs(he(0, 1)), e21 = std::abs(he(1, 0));
    out.max_blocked = std::max(out.max_blocked, plus_to_minus ? e21 : e12);
    out.max_other = std::max(out.max_other, plus_to_minus ? e12 : e21);
  }
  return out;
}

enum class Protocol { Bare, NaiveCD, Hermitian, ZeroCoupling };

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Bare: return "none";
    case Protocol::NaiveCD: return "naive_cd";
    case Protocol::Hermitian: return "hermitian";
    case Protocol::ZeroCoupling: return "zero_coupling";
  }
  return "?";
}

inline std::optional<Protocol> parse_protocol(const std::string& name) {
  for (auto p : {Protocol::Bare, Protocol::NaiveCD, Protocol::Hermitian, Protocol::ZeroCoupling}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

/// Everything needed to drive one pulse with one supplement choice: the
/// grid-sampled angle, energies, coefficients and gauges, plus H(t) at
/// arbitrary t for the integrator.
class ShortcutProtocol {
 public:
  ShortcutProtocol(PulseSpec pulse, const TimeGrid& grid, Protocol protocol,
                   BlockedTransition blocked = BlockedTransition::PlusToMinus)
      : pulse_(std::move(pulse)),
        protocol_(protocol),
        blocked_(blocked),
        path_(mixing_angle_path(pulse_, grid)),
        energies_(matched_eigenvalue_path(pulse_, path_)) {
    switch (protocol_) {
      case Protocol::Hermitian: coeffs_ = hermitian_realizable(path_, blocked_); break;
      case Protocol::ZeroCoupling: {
        const std::vector<double> zeros(grid.size(), 0.0);
        coeffs_ = general_family(path_, zero_coupling_lambda(path_, blocked_), zeros, blocked_);
        break;
      }
      default: break;
    }
    gauges_ = coeffs_ ? gauge_shortcut(energies_.plus, energies_.minus, path_, *coeffs_)
                      : gauge_simple(energies_.plus, energies_.minus, grid);
  }

  const PulseSpec& pulse() const { return pulse_; }
  const TimeGrid& grid() const { return path_.grid; }
  Protocol protocol() const { return protocol_; }
  BlockedTransition blocked() const { return blocked_; }
  const BranchRegime& regime() const { return path_.regime; }
  const MixingAnglePath& path() const { return path_; }
  const EigenvalueTrack& energies() const { return energies_; }
  const std::optional<SupplementCoefficients>& coefficients() const { return coeffs_; }
  const GaugeFunctions& gauges() const { return *gauges_; }

  /// Mixing angle and rate at any t in the window, on the branch of the
  /// nearest grid sample.
  std::pair<complex, complex> angle_at(double t) const {
    const auto& g = path_.grid;
    const double x = std::clamp((t - g.t0()) / g.step(), 0.0, static_cast<double>(g.steps()));
    const auto k = static_cast<std::size_t>(std::lround(x));
    const auto c = pulse_.at(t);
    const complex theta = mixing_angle_near(c, path_.theta[k]);
    if (path_.derivative_source == DerivativeSource::Analytic) return {theta, mixing_angle_rate(c)};
    const auto lo = std::min(static_cast<std::size_t>(x), g.steps() - 1);
    const double w = x - static_cast<double>(lo);
    return {theta, (1.0 - w) * path_.dtheta[lo] + w * path_.dtheta[lo + 1]};
  }

  ComplexMatrix h0(double t) const { return hamiltonian(pulse_, t); }

  ComplexMatrix h1(double t) const {
    if (protocol_ == Protocol::Bare) return ComplexMatrix::zero(2);
    const auto [theta, dtheta] = angle_at(t);
    switch (protocol_) {
      case Protocol::NaiveCD: return naive_cd_point(theta, dtheta);
      case Protocol::Hermitian: return assemble_h1(hermitian_point(theta, dtheta, blocked_));
      case Protocol::ZeroCoupling:
        return assemble_h1(general_point(theta, dtheta, zero_coupling_lambda(dtheta, blocked_), 0.0, blocked_));
      default: return ComplexMatrix::zero(2);
    }
  }

  ComplexMatrix h_total(double t) const { return h0(t) + h1(t); }

 private:
  PulseSpec pulse_;
  Protocol protocol_;
  BlockedTransition blocked_;
  MixingAnglePath path_;
  EigenvalueTrack energies_;
  std::optional<SupplementCoefficients> coeffs_;
  std::optional<GaugeFunctions> gauges_;
};

}  // namespace nhsta
