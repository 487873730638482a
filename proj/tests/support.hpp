#pragma once

// Shared fixtures for the test suites: the worked-example states, random
// generators, and brute-force oracles that never touch the library's
// reshaping or projection code paths.

#include <cmath>
#include <complex>
#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "telemat/coeffmat.hpp"
#include "telemat/qstate.hpp"

namespace telemat::testing {

using cd = std::complex<double>;
using Mat = CMatrix<double>;
using Vec = CVector<double>;
using State = PureState<double>;

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
inline const double kYC = 1.0 / (2.0 * std::sqrt(2.0));

inline QuditDims qubits(std::vector<std::string> labels) {
  std::vector<Index> dims(labels.size(), 2);
  return QuditDims(std::move(dims), std::move(labels));
}

/// State from (digit string, amplitude) pairs on qubits.
inline State ket(std::vector<std::string> labels, std::vector<std::pair<std::string, cd>> terms,
                 bool normalized = true) {
  const QuditDims dims = qubits(std::move(labels));
  Vec v = Vec::Zero(static_cast<Eigen::Index>(dims.total()));
  for (const auto& [bits, amp] : terms) v(std::stoi(bits, nullptr, 2)) += amp;
  return State(dims, v, normalized);
}

inline State epr_ab() { return ket({"1", "2"}, {{"00", kInvSqrt2}, {"11", kInvSqrt2}}); }

/// Bell states on (A, a), in the order (00+11), (00-11), (01+10), (01-10).
inline std::vector<State> bell_states(std::vector<std::string> labels = {"A", "a"}) {
  const double r = kInvSqrt2;
  return {ket(labels, {{"00", r}, {"11", r}}), ket(labels, {{"00", r}, {"11", -r}}),
          ket(labels, {{"01", r}, {"10", r}}), ket(labels, {{"01", r}, {"10", -r}})};
}

/// W-type state (sqrt2/2)|001> + a2|010> + a4|100> with |a2|^2 + |a4|^2 = 1/2.
inline State w_state(cd a2, cd a4) {
  return ket({"1", "2", "3"}, {{"001", std::sqrt(2.0) / 2}, {"010", a2}, {"100", a4}});
}

/// Von Neumann basis on particles (1, 2, a) matched to w_state.
inline std::vector<State> w_basis(cd a2, cd a4) {
  const double h = std::sqrt(2.0) / 2;
  const std::vector<std::string> l{"1", "2", "a"};
  return {ket(l, {{"001", h}, {"010", a2}, {"100", a4}}), ket(l, {{"001", -h}, {"010", a2}, {"100", a4}}),
          ket(l, {{"000", h}, {"011", a2}, {"101", a4}}), ket(l, {{"000", -h}, {"011", a2}, {"101", a4}})};
}

inline State yeo_chua() {
  const double s = kYC;
  return ket({"1", "2", "3", "4"}, {{"0000", s},
                                    {"0011", -s},
                                    {"0101", -s},
                                    {"0110", s},
                                    {"1001", s},
                                    {"1010", s},
                                    {"1100", s},
                                    {"1111", s}});
}

/// Bell(2, a1) (x) Bell(3, a2) written on slot order (2, 3, a1, a2).
inline std::vector<State> bell_bell_basis() {
  std::vector<State> out;
  const auto pair = bell_states({"p", "q"});
  const QuditDims dims = qubits({"2", "3", "a1", "a2"});
  for (const auto& b1 : pair) {
    for (const auto& b2 : pair) {
      Vec v = Vec::Zero(16);
      for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 4; ++j) {
          // b1 digits (p2, a1), b2 digits (p3, a2)
          const Index p2 = i >> 1, a1 = i & 1, p3 = j >> 1, a2 = j & 1;
          v(static_cast<Eigen::Index>(p2 * 8 + p3 * 4 + a1 * 2 + a2)) += b1[i] * b2[j];
        }
      }
      out.emplace_back(dims, v, true);
    }
  }
  return out;
}

inline Mat mat(std::initializer_list<std::initializer_list<cd>> rows) {
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline double max_dev(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return (a - b).cwiseAbs().maxCoeff();
}

// ---- random generators -------------------------------------------------

inline Vec random_vector(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(static_cast<Eigen::Index>(dim));
  for (auto& z : v) z = cd(g(rng), g(rng));
  return v;
}

inline Mat random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = cd(g(rng), g(rng));
  return m;
}

/// Haar unitary: QR of a complex Ginibre matrix with the phase fix on R.
inline Mat random_unitary(Index dim, std::mt19937_64& rng) {
  const Mat z = random_matrix(dim, dim, rng);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const cd d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline State random_state(const QuditDims& dims, std::mt19937_64& rng) {
  Vec v = random_vector(dims.total(), rng);
  return State(dims, v / v.norm(), true);
}

/// Random matrix of a prescribed rank (product of two thin factors).
inline Mat random_rank_matrix(Index rows, Index cols, Index rank, std::mt19937_64& rng) {
  if (rank == 0) return Mat::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return random_matrix(rows, rank, rng) * random_matrix(rank, cols, rng);
}

/// Complete orthonormal basis from the columns of a random unitary.
inline std::vector<State> random_basis(const QuditDims& dims, std::mt19937_64& rng) {
  const Mat u = random_unitary(dims.total(), rng);
  std::vector<State> out;
  for (Eigen::Index c = 0; c < u.cols(); ++c) out.emplace_back(dims, u.col(c), true);
  return out;
}

/// Applies u to the listed slots (big-endian in list order), identity elsewhere.
inline State apply_local(const State& s, const std::vector<Index>& slots, const Mat& u) {
  std::vector<Index> order = slots;
  for (Index k = 0; k < s.dims().particles(); ++k)
    if (std::find(slots.begin(), slots.end(), k) == slots.end()) order.push_back(k);
  const auto front = permute_particles(s, order);
  const auto d = static_cast<Eigen::Index>(s.dims().select(slots).total());
  const auto rest = static_cast<Eigen::Index>(s.size()) / d;
  // amplitudes as a d x rest row-major block
  Vec out(front.amplitudes().size());
  for (Eigen::Index c = 0; c < rest; ++c) {
    Vec col(d);
    for (Eigen::Index r = 0; r < d; ++r) col(r) = front.amplitudes()(r * rest + c);
    col = u * col;
    for (Eigen::Index r = 0; r < d; ++r) out(r * rest + c) = col(r);
  }
  std::vector<Index> inv(order.size());
  for (Index k = 0; k < order.size(); ++k) inv[order[k]] = k;
  return permute_particles(State(front.dims(), out, s.normalized()), inv);
}

/// (1/sqrt d) sum_i |ii> on (B, A).
inline State max_entangled(Index d) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(d * d));
  for (Index i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i * d + i)) = 1.0 / std::sqrt(double(d));
  return State(QuditDims({d, d}, {"B", "A"}), v, true);
}

/// Generalized Bell basis (X^j Z^k (x) I)|Phi> on (A, a), d^2 elements.
inline std::vector<State> generalized_bell_basis(Index d) {
  const double pi = std::acos(-1.0);
  std::vector<State> out;
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < d; ++k) {
      Vec v = Vec::Zero(static_cast<Eigen::Index>(d * d));
      for (Index i = 0; i < d; ++i) {
        const cd phase = std::polar(1.0, 2 * pi * double(k * i) / double(d));
        v(static_cast<Eigen::Index>(((i + j) % d) * d + i)) = phase / std::sqrt(double(d));
      }
      out.emplace_back(QuditDims({d, d}, {"A", "a"}), v, true);
    }
  }
  return out;
}

// ---- oracles -----------------------------------------------------------

/// Channel matrix by explicit digit loops: for every flat index of the state,
/// decode all digits, then assemble the Bob and Alice composite indices.
inline Mat channel_matrix_oracle(const State& s, const Bipartition& p) {
  const auto& dims = s.dims().dims();
  Index n = 1, m = 1;
  for (Index b : p.bob_slots) n *= dims[b];
  for (Index a : p.alice_slots) m *= dims[a];
  Mat c = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Index flat = 0; flat < s.size(); ++flat) {
    std::vector<Index> digit(dims.size());
    Index rest = flat;
    for (Index k = dims.size(); k-- > 0;) {
      digit[k] = rest % dims[k];
      rest /= dims[k];
    }
    Index i = 0, j = 0;
    for (Index b : p.bob_slots) i = i * dims[b] + digit[b];
    for (Index a : p.alice_slots) j = j * dims[a] + digit[a];
    c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[flat];
  }
  return c;
}

/// Rank by Gaussian elimination with full pivoting, independent of the SVD.
inline Index rank_oracle(Mat a, double tol = 1e-8) {
  Index rank = 0;
  const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
  for (Eigen::Index col = 0, row = 0; row < a.rows() && col < a.cols();) {
    Eigen::Index pr = row, pc = col;
    double best = 0;
    for (Eigen::Index i = row; i < a.rows(); ++i)
      for (Eigen::Index j = col; j < a.cols(); ++j)
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          pr = i;
          pc = j;
        }
    if (best <= tol * scale) break;
    a.row(row).swap(a.row(pr));
    a.col(col).swap(a.col(pc));
    for (Eigen::Index i = row + 1; i < a.rows(); ++i) a.row(i) -= (a(i, col) / a(row, col)) * a.row(row);
    ++rank;
    ++row;
    ++col;
  }
  return rank;
}

}  // namespace telemat::testing
