#pragma once

// Coefficient matrices of teleportation: the channel matrix C (rows = Bob's
// composite basis, columns = Alice's), the measurement matrix M^r of each
// basis element on A (x) a, and the collapsed matrix sigma^r = C * conj(M^r)
// that maps the unknown input coefficients onto Bob's unnormalized branch.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "telemat/errors.hpp"
#include "telemat/qstate.hpp"
#include "telemat/types.hpp"

namespace telemat {

/// Split of a state's particle slots between Bob (rows) and Alice (columns).
/// Slot order inside each list fixes the big-endian row/column encoding.
struct Bipartition {
  std::vector<Index> bob_slots;
  std::vector<Index> alice_slots;

  void validate(Index particles) const {
    if (bob_slots.empty() || alice_slots.empty()) {
      throw InvalidPartition("both Bob and Alice must hold at least one particle");
    }
    std::vector<bool> seen(particles, false);
    auto mark = [&](Index s) {
      if (s >= particles) {
        throw InvalidPartition("slot " + std::to_string(s) + " out of range for " +
                               std::to_string(particles) + " particles");
      }
      if (seen[s]) throw InvalidPartition("slot " + std::to_string(s) + " assigned twice");
      seen[s] = true;
    };
    for (Index s : bob_slots) mark(s);
    for (Index s : alice_slots) mark(s);
    if (bob_slots.size() + alice_slots.size() != particles) {
      throw InvalidPartition("partition does not cover every particle");
    }
  }

  /// Bob slots followed by Alice slots.
  std::vector<Index> ordering() const {
    std::vector<Index> perm = bob_slots;
    perm.insert(perm.end(), alice_slots.begin(), alice_slots.end());
    return perm;
  }

  Index bob_dim(const QuditDims& dims) const { return dims.select(bob_slots).total(); }
  Index alice_dim(const QuditDims& dims) const { return dims.select(alice_slots).total(); }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

template <typename Real = double>
struct ChannelMatrix {
  CMatrix<Real> entries;  // n x m
  Index n = 0;
  Index m = 0;
  Bipartition partition;
};

template <typename Real = double>
struct MeasurementMatrix {
  CMatrix<Real> entries;  // m x n
  Index outcome_id = 0;
};

template <typename Real = double>
struct CollapsedMatrix {
  CMatrix<Real> entries;  // n x n
  Index outcome_id = 0;
};

/// Ordered measurement states on Alice's composite space A (x) a, with A the
/// more significant factor. Element order defines the outcome ids.
template <typename Real = double>
struct MeasurementBasis {
  std::vector<PureState<Real>> elements;
  Index m = 0;  // dimension of A
  Index n = 0;  // dimension of a

  MeasurementBasis() = default;
  MeasurementBasis(std::vector<PureState<Real>> elems, Index alice_dim, Index unknown_dim)
      : elements(std::move(elems)), m(alice_dim), n(unknown_dim) {
    for (const auto& e : elements) {
      if (e.size() != m * n) {
        throw DimensionError("basis element of size " + std::to_string(e.size()) +
                             " does not live on A (x) a of size " + std::to_string(m * n));
      }
    }
  }

  Index size() const { return elements.size(); }
  bool complete() const { return elements.size() == m * n; }
};

/// Entry (i, j) is the amplitude whose Bob digits encode i and whose Alice
/// digits encode j, both big-endian in partition order.
template <typename Real>
ChannelMatrix<Real> build_channel_matrix(const PureState<Real>& state, const Bipartition& partition) {
  partition.validate(state.dims().particles());
  const Index n = partition.bob_dim(state.dims());
  const Index m = partition.alice_dim(state.dims());
  const auto ordered = permute_particles(state, partition.ordering());
  // Row-major reshape of the reordered amplitudes.
  using RowMajor = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  CMatrix<Real> c = Eigen::Map<const RowMajor>(ordered.amplitudes().data(), static_cast<Eigen::Index>(n),
                                               static_cast<Eigen::Index>(m));
  return {std::move(c), n, m, partition};
}

/// Entry (k, l) is the amplitude of |k>_A (x) |l>_a in the element.
template <typename Real>
MeasurementMatrix<Real> build_measurement_matrix(const PureState<Real>& element, Index m, Index n,
                                                 Index outcome_id = 0) {
  if (element.size() != m * n) {
    throw DimensionError("measurement element of size " + std::to_string(element.size()) +
                         " cannot be shaped " + std::to_string(m) + " x " + std::to_string(n));
  }
  CMatrix<Real> entries(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Index k = 0; k < m; ++k) {
    for (Index l = 0; l < n; ++l) {
      entries(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = element[k * n + l];
    }
  }
  return {std::move(entries), outcome_id};
}

template <typename Real>
std::vector<MeasurementMatrix<Real>> measurement_matrices(const MeasurementBasis<Real>& basis) {
  std::vector<MeasurementMatrix<Real>> out;
  out.reserve(basis.size());
  for (Index r = 0; r < basis.size(); ++r) {
    out.push_back(build_measurement_matrix(basis.elements[r], basis.m, basis.n, r));
  }
  return out;
}

/// sigma = C * conj(M), with conj taken entrywise (no transpose).
template <typename Real>
CollapsedMatrix<Real> collapsed_matrix(const ChannelMatrix<Real>& c, const MeasurementMatrix<Real>& mm) {
  if (c.entries.cols() != mm.entries.rows() || c.entries.rows() != mm.entries.cols()) {
    throw DimensionError("channel matrix is " + std::to_string(c.entries.rows()) + " x " +
                         std::to_string(c.entries.cols()) + " but measurement matrix is " +
                         std::to_string(mm.entries.rows()) + " x " + std::to_string(mm.entries.cols()));
  }
  return {c.entries * mm.entries.conjugate(), mm.outcome_id};
}

template <typename Derived>
auto singular_values(const Eigen::MatrixBase<Derived>& mat) {
  using Plain = typename Derived::PlainObject;
  return Eigen::JacobiSVD<Plain>(mat.eval()).singularValues();
}

/// Number of singular values above rel_tol * max(rows, cols) * s_max.
template <typename Derived, typename Real>
Index numerical_rank(const Eigen::MatrixBase<Derived>& mat, Real rel_tol) {
  if (mat.size() == 0) throw DimensionError("rank of an empty matrix");
  const auto sv = singular_values(mat);
  const Real smax = sv.size() ? Real(sv(0)) : Real(0);
  if (!(smax > Real(0))) return 0;
  const Real cutoff = rel_tol * Real(std::max(mat.rows(), mat.cols())) * smax;
  return static_cast<Index>((sv.array() > cutoff).count());
}

template <typename Real>
struct ScaledUnitary {
  bool scaled_unitary = false;
  Real k = 0;
};

/// Tests sigma = k U with k = sqrt(tr(sigma sigma^H) / n).
template <typename Derived, typename Real>
ScaledUnitary<Real> is_scaled_unitary(const Eigen::MatrixBase<Derived>& sigma, Real abs_tol) {
  if (sigma.rows() != sigma.cols()) throw DimensionError("scaled-unitary test needs a square matrix");
  const auto n = sigma.rows();
  const auto gram = (sigma * sigma.adjoint()).eval();
  const Real k = std::sqrt(std::max(Real(0), std::real(gram.trace()) / Real(n)));
  using Plain = typename decltype(gram)::PlainObject;
  const Real dev = max_abs(gram - Plain::Identity(n, n) * (k * k));
  return {dev <= abs_tol && k > abs_tol, k};
}

struct BasisPairDeviation {
  Index r = 0;
  Index s = 0;
  double deviation = 0;
};

struct BasisReport {
  Index count = 0;
  Index space_dim = 0;
  bool complete = false;
  bool orthonormal = true;
  double max_deviation = 0;  // max |<phi_r|phi_s> - delta_rs|
  std::vector<BasisPairDeviation> offending;
};

/// Non-throwing orthonormality and completeness check.
template <typename Real>
BasisReport check_basis(const MeasurementBasis<Real>& basis, Real tol = Real(1e-9)) {
  BasisReport rep;
  rep.count = basis.size();
  rep.space_dim = basis.m * basis.n;
  rep.complete = basis.complete();
  for (Index r = 0; r < basis.size(); ++r) {
    for (Index s = r; s < basis.size(); ++s) {
      const Complex<Real> ip = inner_product(basis.elements[r], basis.elements[s]);
      const Real dev = std::abs(ip - Complex<Real>(r == s ? 1 : 0));
      rep.max_deviation = std::max(rep.max_deviation, double(dev));
      if (dev > tol) {
        rep.orthonormal = false;
        rep.offending.push_back({r, s, double(dev)});
      }
    }
  }
  if (rep.count > rep.space_dim) rep.orthonormal = false;
  return rep;
}

/// Throws ValidationError naming the offending pairs.
template <typename Real>
BasisReport validate_basis(const MeasurementBasis<Real>& basis, Real tol = Real(1e-9)) {
  BasisReport rep = check_basis(basis, tol);
  if (!rep.orthonormal) {
    std::ostringstream msg;
    msg << "measurement basis is not orthonormal:";
    if (rep.count > rep.space_dim) msg << " " << rep.count << " elements exceed dimension " << rep.space_dim << ";";
    for (const auto& p : rep.offending) msg << " (" << p.r << "," << p.s << ") deviation " << p.deviation << ";";
    throw ValidationError(msg.str());
  }
  return rep;
}

}  // namespace telemat
