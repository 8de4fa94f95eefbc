#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "nhsta/error.hpp"
#include "nhsta/linalg.hpp"
#include "nhsta/time_grid.hpp"
#include "nhsta/two_level.hpp"

namespace nhsta {

enum class SupplementPolicy { NaiveCD, HermitianRealizable, GeneralFamily };

/// Which adiabatic-frame coupling of H0 + H1 the supplement cancels.
///
/// The state g = (g+, g-) obeys i dg/dt = H^e g, so entry (2,1) feeds |phi->
/// from |phi+> and entry (1,2) feeds |phi+> from |phi->. Keeping a system
/// that starts in |phi+> there requires PlusToMinus. MinusToPlus is the
/// (1,2) variant, kept for comparison; it leaves g+ autonomous but lets g-
/// grow.
enum class BlockedTransition { PlusToMinus, MinusToPlus };

inline std::string to_string(SupplementPolicy p) {
  switch (p) {
    case SupplementPolicy::NaiveCD: return "NaiveCD";
    case SupplementPolicy::HermitianRealizable: return "HermitianRealizable";
    case SupplementPolicy::GeneralFamily: return "GeneralFamily";
  }
  return "?";
}

inline std::string to_string(BlockedTransition b) {
  return b == BlockedTransition::PlusToMinus ? "plus_to_minus" : "minus_to_plus";
}

/// H1 = (1/2) [[delta+, Omega], [Omega*, delta-]] at one instant.
struct SupplementPoint {
  complex delta_plus;
  complex delta_minus;
  complex omega;
};

struct SupplementCoefficients {
  TimeGrid grid;
  std::vector<complex> delta_plus;
  std::vector<complex> delta_minus;
  std::vector<complex> omega;
  SupplementPolicy policy = SupplementPolicy::HermitianRealizable;
  BlockedTransition blocked = BlockedTransition::PlusToMinus;

  SupplementPoint at(std::size_t k) const {
    if (k >= delta_plus.size()) throw Error(ErrorKind::IndexOutOfRange, "supplement index " + std::to_string(k));
    return {delta_plus[k], delta_minus[k], omega[k]};
  }
};

inline constexpr double kSingularityGuard = 1e-9;

/// num / den for the Im[d theta] / Re[sin theta] ratio. Both below the guard
/// is treated as a removable 0/0 and yields 0.
inline double guarded_ratio(double num, double den) {
  if (std::abs(den) < kSingularityGuard) {
    if (std::abs(num) < kSingularityGuard) return 0.0;
    throw Error(ErrorKind::SinThetaSingular, "Re[sin theta] vanishes while Im[d theta/dt] does not");
  }
  return num / den;
}

/// Hermitian supplement with Re[Omega] = 0, delta+ = shift + d/2,
/// delta- = shift - d/2.
///
///   PlusToMinus: d = +2 Im[th'] / Re[sin th], Omega_a = -Re[th'] - d Im[sin th]/2
///   MinusToPlus: d = -2 Im[th'] / Re[sin th], Omega_a = -Re[th'] + d Im[sin th]/2
inline SupplementPoint hermitian_point(complex theta, complex dtheta, BlockedTransition blocked,
                                       double common_shift = 0.0) {
  const complex s = std::sin(theta);
  const double sign = blocked == BlockedTransition::PlusToMinus ? 1.0 : -1.0;
  const double split = sign * 2.0 * guarded_ratio(dtheta.imag(), s.real());
  const double omega_a = -dtheta.real() - sign * split * s.imag() / 2.0;
  return {common_shift + split / 2.0, common_shift - split / 2.0, complex(0.0, omega_a)};
}

inline SupplementCoefficients hermitian_realizable(const MixingAnglePath& path,
                                                   BlockedTransition blocked = BlockedTransition::PlusToMinus,
                                                   double common_shift = 0.0) {
  SupplementCoefficients out{path.grid, {}, {}, {}, SupplementPolicy::HermitianRealizable, blocked};
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const auto p = hermitian_point(path.theta[k], path.dtheta[k], blocked, common_shift);
    out.delta_plus.push_back(p.delta_plus);
    out.delta_minus.push_back(p.delta_minus);
    out.omega.push_back(p.omega);
  }
  return out;
}

inline constexpr double kConsistencyTolerance = 1e-9;

/// Member of the general solution family fixed by lambda = (delta+ - delta-)
/// sin(th)/2 and Re[Omega], with zeta = Re[Omega] cos th. The blocked coupling
/// vanishes iff
///   PlusToMinus: Re lambda = Re zeta + Im th',  Im Omega = Im zeta - Im lambda - Re th'
///   MinusToPlus: Re lambda = Re zeta - Im th',  Im Omega = Im lambda - Im zeta - Re th'
/// Only Im lambda is free; a lambda whose real part violates its constraint,
/// or sin th = 0, is an InconsistentChoice. delta+ = -delta-.
inline SupplementPoint general_point(complex theta, complex dtheta, complex lambda, double re_omega,
                                     BlockedTransition blocked) {
  const complex zeta = re_omega * std::cos(theta);
  const double sign = blocked == BlockedTransition::PlusToMinus ? 1.0 : -1.0;
  const double required_re_lambda = zeta.real() + sign * dtheta.imag();
  if (std::abs(lambda.real() - required_re_lambda) > kConsistencyTolerance * (1.0 + std::abs(dtheta))) {
    throw Error(ErrorKind::InconsistentChoice, "Re lambda must equal Re zeta " +
                                                   std::string(sign > 0 ? "+" : "-") + " Im[d theta/dt]");
  }
  const complex s = std::sin(theta);
  if (std::abs(s) < kSingularityGuard) {
    throw Error(ErrorKind::InconsistentChoice, "sin theta vanishes; lambda cannot be realised");
  }
  const double im_omega = sign * (zeta.imag() - lambda.imag()) - dtheta.real();
  const complex split = 2.0 * lambda / s;
  return {split / 2.0, -split / 2.0, complex(re_omega, im_omega)};
}

inline SupplementCoefficients general_family(const MixingAnglePath& path, std::span<const complex> lambda,
                                             std::span<const double> re_omega,
                                             BlockedTransition blocked = BlockedTransition::PlusToMinus) {
  if (lambda.size() != path.grid.size() || re_omega.size() != path.grid.size()) {
    throw Error(ErrorKind::GridMismatch, "lambda and Re[Omega] must be sampled on the path grid");
  }
  SupplementCoefficients out{path.grid, {}, {}, {}, SupplementPolicy::GeneralFamily, blocked};
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const auto p = general_point(path.theta[k], path.dtheta[k], lambda[k], re_omega[k], blocked);
    out.delta_plus.push_back(p.delta_plus);
    out.delta_minus.push_back(p.delta_minus);
    out.omega.push_back(p.omega);
  }
  return out;
}

/// lambda of the Omega = 0 limiting case (zeta = 0).
inline complex zero_coupling_lambda(complex dtheta, BlockedTransition blocked) {
  return blocked == BlockedTransition::PlusToMinus ? complex(dtheta.imag(), -dtheta.real())
                                                   : complex(-dtheta.imag(), dtheta.real());
}

inline std::vector<complex> zero_coupling_lambda(const MixingAnglePath& path, BlockedTransition blocked) {
  std::vector<complex> out;
  out.reserve(path.dtheta.size());
  for (const auto& d : path.dtheta) out.push_back(zero_coupling_lambda(d, blocked));
  return out;
}

inline ComplexMatrix assemble_h1(const SupplementPoint& p) {
  return ComplexMatrix({{0.5 * p.delta_plus, 0.5 * p.omega}, {0.5 * std::conj(p.omega), 0.5 * p.delta_minus}});
}

inline ComplexMatrix assemble_h1(const SupplementCoefficients& coeffs, std::size_t k) { return assemble_h1(coeffs.at(k)); }

/// Blocked adiabatic-frame entry of H0^e + H1^e divided by (1/2)(f ratio):
///   MinusToPlus (entry 1,2): d sin th/2 - i Im Omega - Re Omega cos th - i th'
///   PlusToMinus (entry 2,1): d sin th/2 + i Im Omega - Re Omega cos th + i th'
inline complex coupling_residual(complex theta, complex dtheta, const SupplementPoint& p, BlockedTransition blocked) {
  const complex split = p.delta_plus - p.delta_minus;
  const complex base = split * std::sin(theta) / 2.0 - p.omega.real() * std::cos(theta);
  if (blocked == BlockedTransition::MinusToPlus) return base - I * p.omega.imag() - I * dtheta;
  return base + I * p.omega.imag() + I * dtheta;
}

struct NullificationReport {
  TimeGrid grid;
  BlockedTransition blocked;
  std::vector<complex> residual;
  double max_abs_residual = 0.0;
};

inline NullificationReport nullification_residual(const MixingAnglePath& path, const SupplementCoefficients& coeffs,
                                                  BlockedTransition blocked) {
  require_same_grid(path.grid, coeffs.grid, "theta path and supplement grids differ");
  NullificationReport report{path.grid, blocked, {}, 0.0};
  report.residual.reserve(path.grid.size());
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const complex r = coupling_residual(path.theta[k], path.dtheta[k], coeffs.at(k), blocked);
    report.residual.push_back(r);
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(r));
  }
  return report;
}

/// Algebraic nullification residual of `coeffs` for the coupling it was
/// built to block.
inline NullificationReport nullification_residual(const MixingAnglePath& path, const SupplementCoefficients& coeffs) {
  return nullification_residual(path, coeffs, coeffs.blocked);
}

}  // namespace nhsta
