#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "nhsta/error.hpp"
#include "nhsta/finite_difference.hpp"
#include "nhsta/linalg.hpp"
#include "nhsta/time_grid.hpp"

namespace nhsta {

inline constexpr double kDefaultDegeneracyThreshold = 1e-8;

enum class GaugeConvention {
  LargestComponentRealPositive,  // fresh decompose() output
  PathMatched,                   // phases aligned to the previous grid point
  Supplied,                      // vectors given by the caller (e.g. analytic)
};

/// Right eigenvectors |n> and their biorthogonal partners |n~>, with
/// <n~|m> = delta_nm. Left vectors are stored as kets; <n~|v> is
/// left[n].dot(v).
struct BiorthogonalSystem {
  std::vector<complex> eigenvalues;
  std::vector<Vector> right;
  std::vector<Vector> left;
  GaugeConvention gauge_convention = GaugeConvention::LargestComponentRealPositive;

  std::size_t size() const { return eigenvalues.size(); }
  Eigen::Index dim() const { return right.empty() ? 0 : right.front().size(); }

  /// <n~|v>
  complex project(std::size_t n, const Vector& v) const { return left[n].dot(v); }
};

struct BiorthogonalityReport {
  double overlap_error;       // max |<n~|m> - delta_nm|
  double completeness_error;  // max |sum_n |n><n~| - 1|
};

inline BiorthogonalityReport check_biorthogonality(const BiorthogonalSystem& sys) {
  const auto n = sys.size();
  const auto dim = sys.dim();
  double overlap = 0.0;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const complex expected = a == b ? 1.0 : 0.0;
      overlap = std::max(overlap, std::abs(sys.project(a, sys.right[b]) - expected));
    }
    sum += sys.right[a] * sys.left[a].adjoint();
  }
  const double completeness = (sum - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  return {overlap, completeness};
}

namespace detail {

inline void fix_phase_largest_component(Vector& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const complex c = v(imax);
  v *= std::conj(c) / std::abs(c);
  v(imax) = std::abs(v(imax));
}

}  // namespace detail

/// Biorthogonal eigen-decomposition of a nondegenerate matrix.
///
/// Right vectors are unit-norm with their largest-magnitude component real
/// positive; left vectors are the conjugated rows of the inverse right-vector
/// matrix, so <n~|n> = 1 holds by construction. Eigenvalues are ordered by
/// decreasing real part, then decreasing imaginary part.
inline BiorthogonalSystem decompose(const ComplexMatrix& h, double degeneracy_threshold = kDefaultDegeneracyThreshold) {
  const auto dim = h.dim();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h.values(), true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonFinite, "eigen solver did not converge");
  }
  const Eigen::VectorXcd values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      if (std::abs(values(i) - values(j)) <= degeneracy_threshold) {
        throw Error(ErrorKind::DegenerateSpectrum,
                    "eigenvalues " + std::to_string(i) + " and " + std::to_string(j) + " coincide within threshold");
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
    return values(a).imag() > values(b).imag();
  });

  Eigen::MatrixXcd right(dim, dim);
  BiorthogonalSystem sys;
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto src = order[static_cast<std::size_t>(c)];
    Vector v = solver.eigenvectors().col(src);
    v.normalize();
    detail::fix_phase_largest_component(v);
    right.col(c) = v;
    sys.eigenvalues.push_back(values(src));
  }
  const Eigen::MatrixXcd inverse = right.partialPivLu().inverse();
  for (Eigen::Index c = 0; c < dim; ++c) {
    sys.right.emplace_back(right.col(c));
    sys.left.emplace_back(inverse.row(c).adjoint());
  }
  return sys;
}

/// sum_n |n> E_n <n~|
inline ComplexMatrix reconstruct(const BiorthogonalSystem& sys) {
  const auto dim = sys.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t n = 0; n < sys.size(); ++n) {
    h += sys.eigenvalues[n] * sys.right[n] * sys.left[n].adjoint();
  }
  return ComplexMatrix(std::move(h));
}

/// Biorthogonal systems sampled along a grid with eigenvector labels and
/// phases carried continuously from one point to the next.
class EigenPath {
 public:
  static constexpr double kMinOverlap = 0.5;

  /// Decomposes h(t_k) on every grid point and matches labels greedily by
  /// the largest |<n~(t_k)|m(t_{k+1})>|. Each matched right vector is then
  /// rephased so that overlap is real positive (left vector rephased to keep
  /// <n~|n> = 1).
  static EigenPath track(const std::function<ComplexMatrix(double)>& h, const TimeGrid& grid,
                         double degeneracy_threshold = kDefaultDegeneracyThreshold) {
    std::vector<BiorthogonalSystem> systems;
    systems.reserve(grid.size());
    systems.push_back(decompose(h(grid.at(0)), degeneracy_threshold));
    for (std::size_t k = 1; k < grid.size(); ++k) {
      BiorthogonalSystem next = decompose(h(grid.at(k)), degeneracy_threshold);
      systems.push_back(match(systems.back(), std::move(next), k));
    }
    return EigenPath(grid, std::move(systems));
  }

  /// Wraps caller-provided systems (for instance analytic eigenvectors). The
  /// continuity invariant is still enforced.
  static EigenPath from_systems(const TimeGrid& grid, std::vector<BiorthogonalSystem> systems) {
    if (systems.size() != grid.size()) {
      throw Error(ErrorKind::GridMismatch, "one biorthogonal system per grid point required");
    }
    for (std::size_t k = 0; k + 1 < systems.size(); ++k) {
      for (std::size_t n = 0; n < systems[k].size(); ++n) {
        if (std::abs(systems[k].project(n, systems[k + 1].right[n])) <= kMinOverlap) {
          throw Error(ErrorKind::BranchJump, "eigenvector path discontinuous at grid index " + std::to_string(k + 1));
        }
      }
    }
    return EigenPath(grid, std::move(systems));
  }

  const TimeGrid& grid() const { return grid_; }
  const std::vector<BiorthogonalSystem>& systems() const { return systems_; }
  const BiorthogonalSystem& operator[](std::size_t k) const { return systems_.at(k); }
  std::size_t levels() const { return systems_.front().size(); }

  /// d|n>/dt at grid index k.
  Vector right_derivative(std::size_t k, std::size_t n) const {
    return central_derivative([&](std::size_t j) -> Vector { return systems_[j].right[n]; }, k, systems_.size(),
                              grid_.step());
  }

  /// d|n~>/dt at grid index k.
  Vector left_derivative(std::size_t k, std::size_t n) const {
    return central_derivative([&](std::size_t j) -> Vector { return systems_[j].left[n]; }, k, systems_.size(),
                              grid_.step());
  }

  void require_interior(std::size_t k) const {
    if (k == 0 || k + 1 >= systems_.size()) {
      throw Error(ErrorKind::IndexOutOfRange, "index " + std::to_string(k) + " has no neighbours on both sides");
    }
  }

 private:
  EigenPath(TimeGrid grid, std::vector<BiorthogonalSystem> systems) : grid_(grid), systems_(std::move(systems)) {}

  static BiorthogonalSystem match(const BiorthogonalSystem& prev, BiorthogonalSystem next, std::size_t k) {
    const auto n = prev.size();
    std::vector<bool> taken(n, false);
    BiorthogonalSystem out;
    out.gauge_convention = GaugeConvention::PathMatched;
    for (std::size_t a = 0; a < n; ++a) {
      std::size_t best = n;
      double best_overlap = -1.0;
      for (std::size_t b = 0; b < n; ++b) {
        if (taken[b]) continue;
        const double o = std::abs(prev.project(a, next.right[b]));
        if (o > best_overlap) {
          best_overlap = o;
          best = b;
        }
      }
      if (best_overlap <= kMinOverlap) {
        throw Error(ErrorKind::BranchJump, "eigenvector matching failed at grid index " + std::to_string(k) +
                                               " (best overlap " + std::to_string(best_overlap) + ")");
      }
      taken[best] = true;
      const complex overlap = prev.project(a, next.right[best]);
      const complex phase = std::conj(overlap) / std::abs(overlap);
      out.eigenvalues.push_back(next.eigenvalues[best]);
      out.right.emplace_back(next.right[best] * phase);
      out.left.emplace_back(next.left[best] * phase);
    }
    return out;
  }

  TimeGrid grid_;
  std::vector<BiorthogonalSystem> systems_;
};

/// i sum_{n != m} <m~|d_t n> |m><n~| at grid index k, in the bare basis.
inline ComplexMatrix counterdiabatic_generic(const EigenPath& path, std::size_t k) {
  path.require_interior(k);
  const auto& sys = path[k];
  const auto dim = sys.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t n = 0; n < sys.size(); ++n) {
    const Vector dn = path.right_derivative(k, n);
    for (std::size_t m = 0; m < sys.size(); ++m) {
      if (m == n) continue;
      h += I * sys.project(m, dn) * sys.right[m] * sys.left[n].adjoint();
    }
  }
  return ComplexMatrix(std::move(h));
}

/// R~^dag H0 R - i R~^dag d_t R with R = sum_n |n><mu_n|: entries
/// delta_mn E_n - i <m~|d_t n>.
inline ComplexMatrix adiabatic_frame_generic(const EigenPath& path, std::size_t k) {
  path.require_interior(k);
  const auto& sys = path[k];
  const auto n_levels = static_cast<Eigen::Index>(sys.size());
  Eigen::MatrixXcd h(n_levels, n_levels);
  for (Eigen::Index n = 0; n < n_levels; ++n) {
    const Vector dn = path.right_derivative(k, static_cast<std::size_t>(n));
    for (Eigen::Index m = 0; m < n_levels; ++m) {
      h(m, n) = -I * sys.project(static_cast<std::size_t>(m), dn);
    }
    h(n, n) += sys.eigenvalues[static_cast<std::size_t>(n)];
  }
  return ComplexMatrix(std::move(h));
}

/// Pieces of the left/right derivative relation at one grid point.
/// `direct` = <n~|d_t m>, `via_left` = -<d_t n~|m> (equal for any
/// biorthogonal path), `hermitian_form` = -(<m~|d_t n>)^* (equal to the other
/// two only when left and right vectors coincide).
struct DerivativeIdentity {
  complex direct;
  complex via_left;
  complex hermitian_form;
};

inline DerivativeIdentity left_right_derivative_identity(const EigenPath& path, std::size_t k, std::size_t n,
                                                         std::size_t m) {
  path.require_interior(k);
  const auto& sys = path[k];
  if (n >= sys.size() || m >= sys.size()) throw Error(ErrorKind::IndexOutOfRange, "level index out of range");
  const Vector dm = path.right_derivative(k, m);
  const Vector dn = path.right_derivative(k, n);
  const Vector dn_left = path.left_derivative(k, n);
  return {sys.project(n, dm), -dn_left.dot(sys.right[m]), -std::conj(sys.project(m, dn))};
}

}  // namespace nhsta
