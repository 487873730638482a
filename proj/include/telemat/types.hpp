#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace telemat {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Index = std::size_t;

/// Numerical thresholds every verdict depends on. Defaults are the
/// documented CLI defaults.
template <typename Real>
struct Tolerances {
  Real rank = Real(1e-10);      // relative, scaled by max(rows, cols) * s_max
  Real unitary = Real(1e-9);    // absolute, max entry of sigma sigma^H - k^2 I
  Real cluster = Real(1e-8);    // relative eigenvalue clustering
  Real probability = Real(1e-14);  // outcomes below this are unreached
};

/// Largest absolute entry of a complex matrix expression; 0 for empty.
template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (m.size() == 0) return Real(0);
  return m.cwiseAbs().maxCoeff();
}

}  // namespace telemat
