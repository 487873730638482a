#pragma once

// Dense multi-qudit pure states.
//
// Index convention throughout the library: big-endian mixed radix, i.e. the
// first-listed particle is the most significant digit, so |b1 b2 ... bk>
// reads left to right.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "telemat/errors.hpp"
#include "telemat/types.hpp"

namespace telemat {

class QuditDims {
 public:
  QuditDims() = default;

  explicit QuditDims(std::vector<Index> dims, std::vector<std::string> labels = {})
      : dims_(std::move(dims)), labels_(std::move(labels)) {
    for (Index d : dims_) {
      if (d < 2) throw DimensionError("qudit dimension must be >= 2, got " + std::to_string(d));
    }
    if (!labels_.empty()) {
      if (labels_.size() != dims_.size()) {
        throw DimensionError("label count " + std::to_string(labels_.size()) +
                             " does not match particle count " + std::to_string(dims_.size()));
      }
      std::set<std::string> seen(labels_.begin(), labels_.end());
      if (seen.size() != labels_.size()) throw DimensionError("particle labels must be unique");
    }
  }

  Index particles() const { return dims_.size(); }
  Index operator[](Index slot) const { return dims_.at(slot); }
  const std::vector<Index>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool labelled() const { return !labels_.empty(); }

  /// Product of all local dimensions (1 for an empty list).
  Index total() const {
    return std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>());
  }

  std::optional<Index> slot_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<Index>(it - labels_.begin());
  }

  /// Dimensions of the listed slots, in the listed order.
  QuditDims select(std::span<const Index> slots) const {
    std::vector<Index> d;
    std::vector<std::string> l;
    for (Index s : slots) {
      d.push_back(dims_.at(s));
      if (labelled()) l.push_back(labels_[s]);
    }
    return QuditDims(std::move(d), std::move(l));
  }

  friend bool operator==(const QuditDims& a, const QuditDims& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<Index> dims_;
  std::vector<std::string> labels_;
};

/// Flat amplitude index of a per-particle digit tuple.
inline Index basis_index(const QuditDims& dims, std::span<const Index> digits) {
  if (digits.size() != dims.particles()) {
    throw IndexError("expected " + std::to_string(dims.particles()) + " digits, got " +
                     std::to_string(digits.size()));
  }
  Index idx = 0;
  for (Index k = 0; k < digits.size(); ++k) {
    if (digits[k] >= dims[k]) {
      throw IndexError("digit " + std::to_string(digits[k]) + " out of range for particle " +
                       std::to_string(k) + " of dimension " + std::to_string(dims[k]));
    }
    idx = idx * dims[k] + digits[k];
  }
  return idx;
}

inline Index basis_index(const QuditDims& dims, std::initializer_list<Index> digits) {
  return basis_index(dims, std::span<const Index>(digits.begin(), digits.size()));
}

/// Inverse of basis_index.
inline std::vector<Index> basis_digits(const QuditDims& dims, Index index) {
  if (index >= dims.total()) {
    throw IndexError("flat index " + std::to_string(index) + " out of range for total dimension " +
                     std::to_string(dims.total()));
  }
  std::vector<Index> digits(dims.particles());
  for (Index k = dims.particles(); k-- > 0;) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
  return digits;
}

template <typename Real = double>
class PureState {
 public:
  using Scalar = Complex<Real>;
  using Vector = CVector<Real>;

  static constexpr Real kNormTolerance = Real(1e-9);

  PureState() = default;

  /// When `normalized` is set the squared norm must be 1 within 1e-9.
  PureState(QuditDims dims, Vector amps, bool normalized = false)
      : dims_(std::move(dims)), amps_(std::move(amps)), normalized_(normalized) {
    if (static_cast<Index>(amps_.size()) != dims_.total()) {
      throw DimensionError("amplitude count " + std::to_string(amps_.size()) +
                           " does not match total dimension " + std::to_string(dims_.total()));
    }
    if (normalized_ && std::abs(amps_.squaredNorm() - Real(1)) > kNormTolerance) {
      throw ValidationError("state flagged normalized has squared norm " +
                            std::to_string(double(amps_.squaredNorm())));
    }
  }

  /// Computational basis ket |digits>.
  static PureState basis(const QuditDims& dims, std::span<const Index> digits) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
    v(static_cast<Eigen::Index>(basis_index(dims, digits))) = Scalar(1);
    return PureState(dims, std::move(v), true);
  }

  static PureState basis(const QuditDims& dims, std::initializer_list<Index> digits) {
    return basis(dims, std::span<const Index>(digits.begin(), digits.size()));
  }

  const QuditDims& dims() const { return dims_; }
  const Vector& amplitudes() const { return amps_; }
  Index size() const { return static_cast<Index>(amps_.size()); }
  bool normalized() const { return normalized_; }
  Real norm() const { return amps_.norm(); }

  Scalar operator[](Index i) const { return amps_(static_cast<Eigen::Index>(i)); }
  Scalar amplitude(std::span<const Index> digits) const { return (*this)[basis_index(dims_, digits)]; }

  PureState relabelled(std::vector<std::string> labels) const {
    return PureState(QuditDims(dims_.dims(), std::move(labels)), amps_, normalized_);
  }

 private:
  QuditDims dims_;
  Vector amps_;
  bool normalized_ = false;
};

template <typename Real>
PureState<Real> tensor_product(const PureState<Real>& a, const PureState<Real>& b) {
  std::vector<Index> dims = a.dims().dims();
  dims.insert(dims.end(), b.dims().dims().begin(), b.dims().dims().end());
  std::vector<std::string> labels;
  if (a.dims().labelled() && b.dims().labelled()) {
    labels = a.dims().labels();
    labels.insert(labels.end(), b.dims().labels().begin(), b.dims().labels().end());
  }
  // amps[i * |b| + j] = a[i] * b[j]
  CVector<Real> amps(static_cast<Eigen::Index>(a.size() * b.size()));
  const auto nb = static_cast<Eigen::Index>(b.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(a.size()); ++i) {
    amps.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  }
  return PureState<Real>(QuditDims(std::move(dims), std::move(labels)), std::move(amps),
                         a.normalized() && b.normalized());
}

/// <a|b>, conjugate-linear in the first argument.
template <typename Real>
Complex<Real> inner_product(const PureState<Real>& a, const PureState<Real>& b) {
  if (!(a.dims() == b.dims())) throw DimensionError("inner product of states with different dims");
  return a.amplitudes().dot(b.amplitudes());
}

template <typename Real>
PureState<Real> normalize(const PureState<Real>& s) {
  const Real nrm = s.norm();
  if (!(nrm > Real(0))) throw DegenerateStateError("cannot normalize the zero vector");
  return PureState<Real>(s.dims(), s.amplitudes() / nrm, true);
}

inline void check_permutation(std::span<const Index> perm, Index particles) {
  if (perm.size() != particles) {
    throw InvalidPermutation("permutation has " + std::to_string(perm.size()) + " entries for " +
                             std::to_string(particles) + " particles");
  }
  std::vector<bool> seen(particles, false);
  for (Index p : perm) {
    if (p >= particles || seen[p]) throw InvalidPermutation("not a permutation of particle slots");
    seen[p] = true;
  }
}

inline std::vector<Index> inverse_permutation(std::span<const Index> perm) {
  check_permutation(perm, perm.size());
  std::vector<Index> inv(perm.size());
  for (Index k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
  return inv;
}

/// Reorders particles: new slot k holds old slot perm[k]. Dimensions and
/// labels travel with their particles. For a two-slot swap on equal
/// dimensions this is the swap operator sum_kl |kl><lk|.
template <typename Real>
PureState<Real> permute_particles(const PureState<Real>& s, std::span<const Index> perm) {
  const QuditDims& src = s.dims();
  check_permutation(perm, src.particles());
  const QuditDims dst = src.select(perm);

  // Stride of each source slot in the source flat index.
  std::vector<Index> src_stride(src.particles(), 1);
  for (Index k = src.particles(); k-- > 1;) src_stride[k - 1] = src_stride[k] * src[k];

  CVector<Real> out(static_cast<Eigen::Index>(s.size()));
  std::vector<Index> digits(dst.particles(), 0);
  for (Index flat = 0; flat < s.size(); ++flat) {
    Index from = 0;
    for (Index k = 0; k < digits.size(); ++k) from += digits[k] * src_stride[perm[k]];
    out(static_cast<Eigen::Index>(flat)) = s[from];
    // increment the destination digit tuple (big-endian odometer)
    for (Index k = digits.size(); k-- > 0;) {
      if (++digits[k] < dst[k]) break;
      digits[k] = 0;
    }
  }
  return PureState<Real>(dst, std::move(out), s.normalized());
}

template <typename Real>
PureState<Real> permute_particles(const PureState<Real>& s, std::initializer_list<Index> perm) {
  return permute_particles(s, std::span<const Index>(perm.begin(), perm.size()));
}

}  // namespace telemat
