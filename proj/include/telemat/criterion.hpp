#pragma once

// Rank criterion for teleportation. A channel/basis pair teleports a general
// n-dimensional input perfectly when every reachable collapsed matrix is a
// scaled unitary; otherwise the largest input subspace on which every
// collapsed matrix acts as a scaled isometry is reported.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "telemat/coeffmat.hpp"
#include "telemat/errors.hpp"
#include "telemat/qstate.hpp"
#include "telemat/types.hpp"

namespace telemat {

enum class Category { Perfect, FullRankImperfect, SubspaceOnly, Impossible };

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::Perfect: return "PERFECT";
    case Category::FullRankImperfect: return "FULL_RANK_IMPERFECT";
    case Category::SubspaceOnly: return "SUBSPACE_ONLY";
    case Category::Impossible: return "IMPOSSIBLE";
  }
  return "?";
}

/// Which of the three shape cases (n < m, n > m, n = m) applies.
enum class RankCase { BobSmaller, BobLarger, Symmetric };

inline std::string_view to_string(RankCase c) {
  switch (c) {
    case RankCase::BobSmaller: return "n<m";
    case RankCase::BobLarger: return "n>m";
    case RankCase::Symmetric: return "n=m";
  }
  return "?";
}

struct RankBound {
  RankCase rank_case = RankCase::Symmetric;
  Index bound = 0;  // upper bound on the rank of any collapsed matrix
  bool full_rank_possible = false;
};

inline RankBound rank_case(Index n, Index m, Index channel_rank) {
  if (n < 1 || m < 1) throw DimensionError("composite dimensions must be >= 1");
  if (channel_rank > std::min(n, m)) {
    throw IndexError("channel rank " + std::to_string(channel_rank) + " exceeds min(n, m) = " +
                     std::to_string(std::min(n, m)));
  }
  RankBound b;
  b.rank_case = n < m ? RankCase::BobSmaller : (n > m ? RankCase::BobLarger : RankCase::Symmetric);
  b.bound = std::min({channel_rank, n, m});
  b.full_rank_possible = b.bound == n;
  return b;
}

template <typename Real = double>
struct SubspaceReport {
  Index dimension = 0;
  CMatrix<Real> basis;  // n x dimension, orthonormal columns
  Real eigenvalue = 0;  // shared eigenvalue of sigma^H sigma on the subspace
  std::vector<Real> outcome_eigenvalues;  // per outcome, for the common subspace
};

namespace detail {

template <typename Real>
struct EigenCluster {
  CMatrix<Real> vectors;
  Real eigenvalue = 0;
};

/// Groups the spectrum of a Hermitian PSD matrix into clusters whose
/// consecutive gaps are at most cluster_tol * scale. Ascending order.
template <typename Real>
std::vector<EigenCluster<Real>> eigen_clusters(const CMatrix<Real>& herm, Real cluster_tol, Real scale) {
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(herm);
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const Real gap = cluster_tol * scale;
  std::vector<EigenCluster<Real>> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= vals.size(); ++i) {
    if (i == vals.size() || vals(i) - vals(i - 1) > gap) {
      const Eigen::Index len = i - start;
      out.push_back({vecs.middleCols(start, len), vals.segment(start, len).mean()});
      start = i;
    }
  }
  return out;
}

template <typename Real>
Real spectral_scale(const CMatrix<Real>& herm) {
  if (herm.size() == 0) return 0;
  return Eigen::SelfAdjointEigenSolver<CMatrix<Real>>(herm, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

/// Largest eigen-cluster of mat^H mat above the zero threshold.
template <typename Real>
SubspaceReport<Real> isometric_subspace(const CMatrix<Real>& mat, Real cluster_tol) {
  const CMatrix<Real> h = mat.adjoint() * mat;
  SubspaceReport<Real> rep;
  rep.basis = CMatrix<Real>::Zero(h.rows(), 0);
  const Real scale = spectral_scale(h);
  if (!(scale > Real(0))) return rep;
  const EigenCluster<Real>* best = nullptr;
  const auto clusters = eigen_clusters(h, cluster_tol, scale);
  for (const auto& c : clusters) {
    if (!(c.eigenvalue > cluster_tol * scale)) continue;
    // ascending order, so >= prefers the larger eigenvalue on dimension ties
    if (!best || c.vectors.cols() >= best->vectors.cols()) best = &c;
  }
  if (!best) return rep;
  rep.dimension = static_cast<Index>(best->vectors.cols());
  rep.basis = best->vectors;
  rep.eigenvalue = best->eigenvalue;
  return rep;
}

}  // namespace detail

/// Largest eigenspace of sigma^H sigma (non-zero eigenvalue); sigma restricted
/// to it is a scaled isometry, so inputs supported there teleport perfectly
/// through this outcome.
template <typename Real>
SubspaceReport<Real> teleportable_subspace(const CollapsedMatrix<Real>& sigma, Real cluster_tol) {
  if (sigma.entries.rows() != sigma.entries.cols()) throw DimensionError("collapsed matrix must be square");
  return detail::isometric_subspace<Real>(sigma.entries, cluster_tol);
}

/// Largest subspace lying inside one eigenspace of sigma_r^H sigma_r for every
/// outcome r at once (a zero eigenvalue means that outcome never fires for
/// inputs there). Candidates are refined outcome by outcome; the pieces of one
/// candidate are mutually orthogonal, so their total dimension never exceeds n.
template <typename Real>
SubspaceReport<Real> common_teleportable_subspace(const std::vector<CollapsedMatrix<Real>>& sigmas,
                                                  Index n, Real cluster_tol) {
  SubspaceReport<Real> rep;
  rep.basis = CMatrix<Real>::Zero(static_cast<Eigen::Index>(n), 0);
  std::vector<CMatrix<Real>> grams;
  Real scale = 0;
  for (const auto& s : sigmas) {
    if (s.entries.rows() != static_cast<Eigen::Index>(n) || s.entries.cols() != static_cast<Eigen::Index>(n)) {
      throw DimensionError("collapsed matrices must all be n x n");
    }
    grams.push_back(s.entries.adjoint() * s.entries);
    scale = std::max(scale, detail::spectral_scale(grams.back()));
  }
  if (!(scale > Real(0))) return rep;

  struct Candidate {
    CMatrix<Real> basis;
    std::vector<Real> eigenvalues;
  };
  std::vector<Candidate> candidates{{CMatrix<Real>::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), {}}};
  const Real null_tol = std::sqrt(cluster_tol);

  for (const auto& h : grams) {
    const auto clusters = detail::eigen_clusters(h, cluster_tol, scale);
    std::vector<Candidate> next;
    for (const auto& cand : candidates) {
      for (const auto& cl : clusters) {
        // x = Q y inside the cluster: (I - V V^H) Q y = 0
        const CMatrix<Real> resid = cand.basis - cl.vectors * (cl.vectors.adjoint() * cand.basis);
        Eigen::JacobiSVD<CMatrix<Real>> svd(resid, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < cand.basis.cols(); ++i) {
          if (i >= sv.size() || sv(i) <= null_tol) keep.push_back(i);
        }
        if (keep.empty()) continue;
        CMatrix<Real> y(cand.basis.cols(), static_cast<Eigen::Index>(keep.size()));
        for (Eigen::Index c = 0; c < y.cols(); ++c) y.col(c) = svd.matrixV().col(keep[static_cast<Index>(c)]);
        Candidate piece{cand.basis * y, cand.eigenvalues};
        // re-orthonormalize against accumulated rounding
        Eigen::HouseholderQR<CMatrix<Real>> qr(piece.basis);
        piece.basis = qr.householderQ() * CMatrix<Real>::Identity(piece.basis.rows(), piece.basis.cols());
        piece.eigenvalues.push_back(cl.eigenvalue);
        next.push_back(std::move(piece));
      }
    }
    candidates = std::move(next);
  }

  const Candidate* best = nullptr;
  Real best_weight = 0;
  for (const auto& c : candidates) {
    const Real weight = std::accumulate(c.eigenvalues.begin(), c.eigenvalues.end(), Real(0));
    if (!(weight > cluster_tol * scale)) continue;  // no outcome fires on this piece
    if (!best || c.basis.cols() > best->basis.cols() ||
        (c.basis.cols() == best->basis.cols() && weight > best_weight * (Real(1) + cluster_tol))) {
      best = &c;
      best_weight = weight;
    }
  }
  if (!best) return rep;
  rep.dimension = static_cast<Index>(best->basis.cols());
  rep.basis = best->basis;
  rep.outcome_eigenvalues = best->eigenvalues;
  rep.eigenvalue = *std::max_element(best->eigenvalues.begin(), best->eigenvalues.end());
  return rep;
}

template <typename Real = double>
struct OutcomeAnalysis {
  Index outcome_id = 0;
  MeasurementMatrix<Real> measurement;
  CollapsedMatrix<Real> collapsed;
  Index measurement_rank = 0;
  Index collapsed_rank = 0;
  ScaledUnitary<Real> unitarity;
  bool zero = false;  // sigma_r = 0: never fires
};

template <typename Real = double>
struct TeleportVerdict {
  Index n = 0;
  Index m = 0;
  ChannelMatrix<Real> channel;
  Index channel_rank = 0;
  RankBound bound;
  std::vector<OutcomeAnalysis<Real>> outcomes;
  Category category = Category::SubspaceOnly;
  Index subspace_dim = 0;
  SubspaceReport<Real> subspace;
  // PERFECT with differing k_r: outcome probabilities depend on the input.
  bool input_dependent_probabilities = false;

  std::vector<Index> measurement_ranks() const {
    std::vector<Index> r;
    for (const auto& o : outcomes) r.push_back(o.measurement_rank);
    return r;
  }
  std::vector<Index> collapsed_ranks() const {
    std::vector<Index> r;
    for (const auto& o : outcomes) r.push_back(o.collapsed_rank);
    return r;
  }
};

template <typename Real>
TeleportVerdict<Real> classify(const PureState<Real>& channel, const Bipartition& partition,
                               const MeasurementBasis<Real>& basis, const Tolerances<Real>& tol = {}) {
  validate_basis(basis, Real(1e-9));
  TeleportVerdict<Real> v;
  v.channel = build_channel_matrix(channel, partition);
  v.n = v.channel.n;
  v.m = v.channel.m;
  if (basis.m != v.m || basis.n != v.n) {
    throw DimensionError("basis lives on " + std::to_string(basis.m) + " x " + std::to_string(basis.n) +
                         " but the partition gives m = " + std::to_string(v.m) + ", n = " + std::to_string(v.n));
  }
  v.channel_rank = numerical_rank(v.channel.entries, tol.rank);
  v.bound = rank_case(v.n, v.m, v.channel_rank);

  std::vector<CollapsedMatrix<Real>> sigmas;
  for (auto& mm : measurement_matrices(basis)) {
    OutcomeAnalysis<Real> o;
    o.outcome_id = mm.outcome_id;
    o.collapsed = collapsed_matrix(v.channel, mm);
    o.measurement_rank = numerical_rank(mm.entries, tol.rank);
    o.collapsed_rank = numerical_rank(o.collapsed.entries, tol.rank);
    o.unitarity = is_scaled_unitary(o.collapsed.entries, tol.unitary);
    o.zero = o.collapsed_rank == 0;
    o.measurement = std::move(mm);
    sigmas.push_back(o.collapsed);
    v.outcomes.push_back(std::move(o));
  }

  bool any_reached = false;
  bool all_unitary = true;
  bool all_full_rank = true;
  for (const auto& o : v.outcomes) {
    if (o.zero) continue;
    any_reached = true;
    all_unitary = all_unitary && o.unitarity.scaled_unitary;
    all_full_rank = all_full_rank && o.collapsed_rank == v.n;
  }

  v.subspace = common_teleportable_subspace(sigmas, v.n, tol.cluster);
  if (any_reached && all_unitary) {
    v.category = Category::Perfect;
    Real kmin = 0, kmax = 0;
    bool first = true;
    for (const auto& o : v.outcomes) {
      if (o.zero) continue;
      kmin = first ? o.unitarity.k : std::min(kmin, o.unitarity.k);
      kmax = first ? o.unitarity.k : std::max(kmax, o.unitarity.k);
      first = false;
    }
    v.input_dependent_probabilities = kmax - kmin > tol.unitary;
  } else if (v.n > v.m) {
    v.category = Category::Impossible;
  } else if (any_reached && all_full_rank) {
    v.category = Category::FullRankImperfect;
  } else {
    v.category = Category::SubspaceOnly;
  }
  v.subspace_dim = v.subspace.dimension;
  return v;
}

/// Basis-free verdict on the channel alone. The channel supports perfect
/// teleportation of a general input (with a suitably matched basis) iff
/// C C^H = k^2 I_n, i.e. Bob's reduced state is maximally mixed.
template <typename Real = double>
struct ChannelVerdict {
  ChannelMatrix<Real> channel;
  Index channel_rank = 0;
  RankBound bound;
  ScaledUnitary<Real> coisometry;  // test of C C^H = k^2 I
  Category category = Category::SubspaceOnly;
  SubspaceReport<Real> subspace;  // largest eigen-cluster of C C^H
};

template <typename Real>
ChannelVerdict<Real> classify_channel(const PureState<Real>& channel, const Bipartition& partition,
                                      const Tolerances<Real>& tol = {}) {
  ChannelVerdict<Real> v;
  v.channel = build_channel_matrix(channel, partition);
  v.channel_rank = numerical_rank(v.channel.entries, tol.rank);
  v.bound = rank_case(v.channel.n, v.channel.m, v.channel_rank);

  const CMatrix<Real> gram = v.channel.entries * v.channel.entries.adjoint();
  const auto n = gram.rows();
  const Real k = std::sqrt(std::max(Real(0), std::real(gram.trace()) / Real(n)));
  const Real dev = max_abs(gram - CMatrix<Real>::Identity(n, n) * (k * k));
  v.coisometry = {dev <= tol.unitary && k > tol.unitary, k};
  v.subspace = detail::isometric_subspace<Real>(v.channel.entries.adjoint(), tol.cluster);

  if (v.channel.n > v.channel.m) {
    v.category = Category::Impossible;
  } else if (v.coisometry.scaled_unitary) {
    v.category = Category::Perfect;
  } else if (v.channel_rank == v.channel.n) {
    v.category = Category::FullRankImperfect;
  } else {
    v.category = Category::SubspaceOnly;
  }
  return v;
}

}  // namespace telemat
