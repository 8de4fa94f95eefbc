#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nhsta/biorthogonal.hpp"
#include "nhsta/gauge.hpp"
#include "nhsta/propagator.hpp"
#include "nhsta/supplement.hpp"
#include "test_support.hpp"

namespace nhsta {
namespace {

using testing::ae_grid;
using testing::ae_pulse;

struct AePath {
  PulseSpec pulse;
  MixingAnglePath path;
  EigenvalueTrack energies;
};

AePath ae_path(double gamma, std::size_t steps = 4000) {
  auto pulse = ae_pulse(gamma);
  auto path = mixing_angle_path(pulse, ae_grid(steps));
  auto energies = matched_eigenvalue_path(pulse, path);
  return {std::move(pulse), std::move(path), std::move(energies)};
}

TEST(CumulativeTrapezoid, IntegratesLinearFunctionExactly) {
  const TimeGrid grid(0.0, 2.0, 10);
  std::vector<complex> y;
  for (double t : grid.samples()) y.push_back(complex(3 * t, -t));
  const auto out = cumulative_trapezoid(y, grid);
  EXPECT_EQ(out.front(), 0.0);
  EXPECT_NEAR(std::abs(out.back() - complex(6.0, -2.0)), 0.0, 1e-14);
}

TEST(GaugeSimple, HermitianSpectrumGivesUnitGauge) {
  const auto ae = ae_path(0.0);
  const auto g = gauge_simple(ae.energies.plus, ae.energies.minus, ae.path.grid);
  EXPECT_EQ(g.kind, GaugeKind::Simple);
  for (std::size_t k = 0; k < g.f_plus.size(); ++k) {
    EXPECT_EQ(g.f_plus[k], 1.0);
    EXPECT_EQ(g.f_minus[k], 1.0);
  }
}

TEST(GaugeSimple, ConstantDecayIsExponential) {
  const double gamma = 0.8, T = 2.0;
  const TimeGrid grid(0.0, T, 200);
  const std::vector<complex> e(grid.size(), complex(0.3, -gamma / 2));
  const auto g = gauge_simple(e, e, grid);
  EXPECT_NEAR(g.f_plus.back().real(), std::exp(-gamma * T / 2), 1e-14);
  EXPECT_EQ(g.f_plus.back().imag(), 0.0);
}

TEST(GaugeSimple, PhaseFunctionAddsPhase) {
  const TimeGrid grid(0.0, 1.0, 100);
  const std::vector<complex> e(grid.size(), complex(0.0, 0.0));
  const auto g = gauge_simple(e, e, grid, [](double) { return 2.0; });
  EXPECT_NEAR(std::abs(g.f_plus.back() - std::polar(1.0, 2.0)), 0.0, 1e-13);
  EXPECT_EQ(g.f_minus.back(), 1.0);
}

TEST(GaugeSimple, NonFiniteIntegrandIsRejected) {
  const TimeGrid grid(0.0, 1.0, 4);
  std::vector<complex> e(grid.size(), 0.0);
  e[2] = complex(0.0, std::nan(""));
  try {
    gauge_simple(e, e, grid);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::NonFinite);
  }
}

TEST(GaugeSimple, AllenEberlyModulusFollowsDecaySign) {
  const auto ae = ae_path(0.3);
  const auto g = gauge_simple(ae.energies.plus, ae.energies.minus, ae.path.grid);
  EXPECT_EQ(g.f_plus.front(), 1.0);
  bool nonpositive = true;
  for (const auto& e : ae.energies.plus) nonpositive = nonpositive && e.imag() <= 0.0;
  ASSERT_TRUE(nonpositive) << "sign audit: Im E+ must be <= 0 on this path";
  for (std::size_t k = 0; k + 1 < g.f_plus.size(); ++k) {
    EXPECT_LE(std::abs(g.f_plus[k + 1]), std::abs(g.f_plus[k]));
    EXPECT_GT(g.f_plus[k].real(), 0.0);
    EXPECT_EQ(g.f_plus[k].imag(), 0.0);
  }
}

TEST(GaugeShortcut, HermitianLimitIsUnit) {
  const auto ae = ae_path(0.0);
  const auto coeffs = hermitian_realizable(ae.path);
  const auto g = gauge_shortcut(ae.energies.plus, ae.energies.minus, ae.path, coeffs);
  EXPECT_EQ(g.kind, GaugeKind::ShortcutMatched);
  for (const auto& f : g.f_plus) EXPECT_NEAR(std::abs(f - 1.0), 0.0, 1e-15);
}

TEST(GaugeShortcut, EndpointMatchesFineSimpsonQuadrature) {
  const auto ae = ae_path(1.0);
  const auto coeffs = hermitian_realizable(ae.path);
  const auto g = gauge_shortcut(ae.energies.plus, ae.energies.minus, ae.path, coeffs);

  // Composite Simpson on a 10x finer grid of the same integrand.
  const auto fine = ae_path(1.0, 40000);
  const auto fine_coeffs = hermitian_realizable(fine.path);
  const double h = fine.path.grid.step();
  double integral = 0.0;
  for (std::size_t k = 0; k < fine.path.grid.size(); ++k) {
    const double w = (k == 0 || k + 1 == fine.path.grid.size()) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const double integrand =
        (fine.energies.plus[k] + 0.5 * fine_coeffs.delta_plus[k] * std::cos(fine.path.theta[k])).imag();
    integral += w * integrand;
  }
  integral *= h / 3;
  const double expected = std::exp(integral);
  EXPECT_NEAR(g.f_plus.back().real() / expected, 1.0, 1e-8);
  EXPECT_EQ(g.f_plus.back().imag(), 0.0);
}

TEST(GaugeShortcut, ModulusConditionHoldsPointwise) {
  for (double gamma : {0.1, 0.3, 1.0}) {
    const auto ae = ae_path(gamma);
    const auto coeffs = hermitian_realizable(ae.path);
    const auto g = gauge_shortcut(ae.energies.plus, ae.energies.minus, ae.path, coeffs);
    for (std::size_t k = 0; k < g.f_plus.size(); ++k) {
      const complex exponent =
          ae.energies.plus[k] - I * g.rate_plus[k] + 0.5 * coeffs.delta_plus[k] * std::cos(ae.path.theta[k]);
      EXPECT_LE(std::abs(exponent.imag()), 1e-10) << "gamma=" << gamma << " k=" << k;
    }
  }
}

TEST(Rotation, IdentityAngle) {
  const auto f = rotation(0.0, 1.0, 1.0);
  const ComplexMatrix expected({{1.0, 0.0}, {0.0, -1.0}});
  EXPECT_EQ(max_abs_diff(f.r, expected), 0.0);
  EXPECT_EQ(max_abs_diff(f.r_tilde, expected), 0.0);
}

TEST(Rotation, InverseFrameIdentityForRandomInputs) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const auto f = rotation(complex(u(rng), u(rng) / 2), std::polar(std::exp(u(rng) / 2), u(rng)),
                            std::polar(std::exp(u(rng) / 2), u(rng)));
    EXPECT_LE(max_abs_diff(f.r_tilde.adjoint() * f.r, ComplexMatrix::identity(2)), 1e-12);
  }
}

TEST(Rotation, ComplexAngleIsNonUnitaryButInvertible) {
  const auto f = rotation(complex(std::numbers::pi / 2, -0.15123), 1.0, 1.0);
  EXPECT_LE(max_abs_diff(f.r_tilde.adjoint() * f.r, ComplexMatrix::identity(2)), 1e-12);
  EXPECT_GT(max_abs_diff(f.r.adjoint() * f.r, ComplexMatrix::identity(2)), 1e-3);
}

TEST(Rotation, ZeroGaugeIsRejected) {
  try {
    rotation(0.3, 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroGauge);
  }
}

TEST(Rotation, InverseFrameIdentityAlongAllenEberlyPaths) {
  for (double gamma : {0.0, 0.1, 0.3, 1.0, 3.0}) {
    const auto ae = ae_path(gamma);
    const auto simple = gauge_simple(ae.energies.plus, ae.energies.minus, ae.path.grid);
    const auto shortcut = gauge_shortcut(ae.energies.plus, ae.energies.minus, ae.path, hermitian_realizable(ae.path));
    for (const auto* g : {&simple, &shortcut}) {
      double err = 0.0;
      for (std::size_t k = 0; k < ae.path.grid.size(); ++k) {
        const auto f = rotation(ae.path, *g, k);
        err = std::max(err, max_abs_diff(f.r_tilde.adjoint() * f.r, ComplexMatrix::identity(2)));
      }
      EXPECT_LE(err, 1e-12) << "gamma=" << gamma;
    }
  }
}

TEST(AdiabaticFrameH0, ConstantPulseIsDiagonal) {
  PulseSpec pulse;
  pulse.omega_r = [](double) { return 0.8; };
  pulse.delta = [](double) { return -0.3; };
  pulse.gamma = [](double) { return 0.4; };
  pulse.d_omega_r = pulse.d_delta = pulse.d_gamma = [](double) { return 0.0; };
  const TimeGrid grid(0.0, 1.0, 50);
  const auto path = mixing_angle_path(pulse, grid);
  const auto energies = matched_eigenvalue_path(pulse, path);
  const auto g = gauge_simple(energies.plus, energies.minus, grid);
  const auto he = adiabatic_frame_h0(pulse, path, g, 20);
  EXPECT_EQ(std::abs(he(0, 1)), 0.0);
  EXPECT_EQ(std::abs(he(1, 0)), 0.0);
  EXPECT_NEAR(std::abs(he(0, 0) - (energies.plus[20] - I * g.rate_plus[20])), 0.0, 1e-15);
  EXPECT_NEAR(he(0, 0).imag(), 0.0, 1e-15);
}

TEST(AdiabaticFrameH0, MatchesGenericFrameOnGaugedBasis) {
  const auto ae = ae_path(0.3);
  const auto g = gauge_simple(ae.energies.plus, ae.energies.minus, ae.path.grid);
  std::vector<BiorthogonalSystem> systems;
  for (std::size_t k = 0; k < ae.path.grid.size(); ++k) {
    const auto v = eigenvectors(ae.path.theta[k]);
    BiorthogonalSystem s;
    s.eigenvalues = {ae.energies.plus[k], ae.energies.minus[k]};
    s.right = {g.f_plus[k] * v.plus, g.f_minus[k] * v.minus};
    s.left = {v.plus_left / std::conj(g.f_plus[k]), v.minus_left / std::conj(g.f_minus[k])};
    s.gauge_convention = GaugeConvention::Supplied;
    systems.push_back(std::move(s));
  }
  const auto path = EigenPath::from_systems(ae.path.grid, std::move(systems));
  for (std::size_t k : {3ul, 1000ul, 1990ul, 2000ul, 2010ul, 3500ul, 3997ul}) {
    EXPECT_LE(max_abs_diff(adiabatic_frame_h0(ae.pulse, ae.path, g, k), adiabatic_frame_generic(path, k)), 1e-6)
        << "k=" << k;
  }
}

TEST(AdiabaticFrameH0, OffDiagonalAntisymmetryPattern) {
  const auto ae = ae_path(1.0);
  const auto g = gauge_simple(ae.energies.plus, ae.energies.minus, ae.path.grid);
  for (std::size_t k = 0; k < ae.path.grid.size(); k += 97) {
    const auto he = adiabatic_frame_h0(ae.pulse, ae.path, g, k);
    const complex ratio = g.f_plus[k] / g.f_minus[k];
    EXPECT_LE(std::abs(he(1, 0) + he(0, 1) * ratio * ratio), 1e-13 * (1.0 + std::abs(he(1, 0))));
  }
}

TEST(AdiabaticFrameH0, IndexOutOfRange) {
  const auto ae = ae_path(0.3, 100);
  const auto g = gauge_simple(ae.energies.plus, ae.energies.minus, ae.path.grid);
  try {
    adiabatic_frame_h0(ae.pulse, ae.path, g, 101);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST(AdiabaticFrameH0, SlowPulseFollowsAdiabaticSolution) {
  // Slow, strong pulse: coupling |th'/2| stays far below the level gap, so
  // with no supplement |g+| stays at its adiabatic value 1.
  AllenEberlyParams p;
  p.omega0 = 5.0;
  p.delta0 = 5.0;
  p.tau = 50.0;
  p.gamma = 0.02;
  p.t0 = -50.0;
  p.t_final = 50.0;
  const auto pulse = allen_eberly(p);
  const TimeGrid grid(p.t0, p.t_final, 20000);
  const auto path = mixing_angle_path(pulse, grid);
  const auto energies = matched_eigenvalue_path(pulse, path);
  const auto g = gauge_simple(energies.plus, energies.minus, grid);
  for (std::size_t k = 0; k < grid.size(); k += 50) {
    const auto he = adiabatic_frame_h0(pulse, path, g, k);
    ASSERT_LT(std::abs(he(0, 1)), 0.01 * std::abs(he(0, 0)));
    ASSERT_LT(std::abs(he(1, 0)), 0.01 * std::abs(he(1, 1)));
  }
  const Vector psi0 = g.f_plus.front() * eigenvectors(path.theta.front()).plus;
  const auto traj = integrate([&](double t) { return hamiltonian(pulse, t); }, psi0, grid);
  const auto a = amplitudes(traj, path, g);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(std::abs(a.g_plus[k]), 1.0, 0.02);
}

}  // namespace
}  // namespace nhsta
