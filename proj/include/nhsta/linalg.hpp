#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <utility>

#include "nhsta/error.hpp"

namespace nhsta {

using complex = std::complex<double>;
using Vector = Eigen::VectorXcd;

inline constexpr complex I{0.0, 1.0};

inline bool is_finite(complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Dense square complex matrix with finite entries. Holds every Hamiltonian
/// and frame rotation in the library (hbar = 1, energies in 1/tau).
class ComplexMatrix {
 public:
  explicit ComplexMatrix(Eigen::MatrixXcd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.rows() != values_.cols()) {
      throw Error(ErrorKind::InvalidArgument, "ComplexMatrix must be square with dim >= 1");
    }
    if (!values_.allFinite()) {
      throw Error(ErrorKind::NonFinite, "ComplexMatrix entries must be finite");
    }
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows)
      : ComplexMatrix(from_rows(rows)) {}

  static ComplexMatrix zero(Eigen::Index dim) { return ComplexMatrix(Eigen::MatrixXcd::Zero(dim, dim)); }
  static ComplexMatrix identity(Eigen::Index dim) {
    return ComplexMatrix(Eigen::MatrixXcd::Identity(dim, dim));
  }

  Eigen::Index dim() const { return values_.rows(); }
  const Eigen::MatrixXcd& values() const { return values_; }
  complex operator()(Eigen::Index row, Eigen::Index col) const { return values_(row, col); }

  ComplexMatrix adjoint() const { return ComplexMatrix(values_.adjoint()); }

  /// Largest entry modulus.
  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }

  bool is_hermitian(double tol) const { return (values_ - values_.adjoint()).cwiseAbs().maxCoeff() <= tol; }

  Vector apply(const Vector& v) const { return values_ * v; }

  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    return ComplexMatrix(a.values_ + b.values_);
  }
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    return ComplexMatrix(a.values_ - b.values_);
  }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    return ComplexMatrix(a.values_ * b.values_);
  }
  friend ComplexMatrix operator*(complex s, const ComplexMatrix& m) { return ComplexMatrix(s * m.values_); }

 private:
  static Eigen::MatrixXcd from_rows(std::initializer_list<std::initializer_list<complex>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd m(n, n);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw Error(ErrorKind::InvalidArgument, "ComplexMatrix rows must all have length dim");
      }
      Eigen::Index c = 0;
      for (const auto& v : row) m(r, c++) = v;
      ++r;
    }
    return m;
  }

  Eigen::MatrixXcd values_;
};

/// max_ij |a_ij - b_ij|
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

}  // namespace nhsta
