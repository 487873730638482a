#pragma once

// Brute-force state-vector teleportation. Everything here works on the full
// system vector |chi>_a (x) |psi>_channel and projects with <phi^r|_{Aa};
// the coefficient matrices are only used to pick Bob's correction, so the
// branches computed here independently check sigma^r = C conj(M^r).

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "telemat/coeffmat.hpp"
#include "telemat/criterion.hpp"
#include "telemat/errors.hpp"
#include "telemat/qstate.hpp"
#include "telemat/types.hpp"

namespace telemat {

/// Slot bookkeeping of the composed system: the unknown's particles come
/// first, then the channel's particles shifted by their count.
struct SystemLayout {
  Index unknown_particles = 0;
  Bipartition partition;  // in channel slot numbering
  Index n = 0;            // Bob (and unknown) dimension
  Index m = 0;            // Alice dimension

  std::vector<Index> bob_system_slots() const { return shifted(partition.bob_slots); }
  std::vector<Index> alice_system_slots() const { return shifted(partition.alice_slots); }
  std::vector<Index> unknown_system_slots() const {
    std::vector<Index> s(unknown_particles);
    for (Index k = 0; k < unknown_particles; ++k) s[k] = k;
    return s;
  }

 private:
  std::vector<Index> shifted(const std::vector<Index>& slots) const {
    std::vector<Index> out;
    for (Index s : slots) out.push_back(s + unknown_particles);
    return out;
  }
};

template <typename Real = double>
struct ComposedSystem {
  PureState<Real> state;
  SystemLayout layout;
};

template <typename Real>
ComposedSystem<Real> compose_system(const PureState<Real>& unknown, const PureState<Real>& channel,
                                    const Bipartition& partition) {
  partition.validate(channel.dims().particles());
  SystemLayout layout{unknown.dims().particles(), partition, partition.bob_dim(channel.dims()),
                      partition.alice_dim(channel.dims())};
  if (unknown.size() != layout.n) {
    throw DimensionError("unknown state has dimension " + std::to_string(unknown.size()) +
                         " but Bob holds dimension " + std::to_string(layout.n));
  }
  return {tensor_product(unknown, channel), std::move(layout)};
}

template <typename Real = double>
struct Branch {
  Real probability = 0;
  CVector<Real> bob_state_raw;  // unnormalized, Bob slots in partition order
};

/// (<phi|_{Aa} (x) I_B) |system>, with phi ordered A slots then a slots.
template <typename Real>
Branch<Real> project_outcome(const ComposedSystem<Real>& sys, const PureState<Real>& element) {
  const auto& lay = sys.layout;
  if (element.size() != lay.m * lay.n) {
    throw DimensionError("basis element of size " + std::to_string(element.size()) +
                         " does not match A (x) a of size " + std::to_string(lay.m * lay.n));
  }
  // Reorder the system to (B..., A..., a...) and view it as n x (m n).
  std::vector<Index> order = lay.bob_system_slots();
  for (Index s : lay.alice_system_slots()) order.push_back(s);
  for (Index s : lay.unknown_system_slots()) order.push_back(s);
  const auto ordered = permute_particles(sys.state, order);

  const auto cols = static_cast<Eigen::Index>(lay.m * lay.n);
  CVector<Real> bob = CVector<Real>::Zero(static_cast<Eigen::Index>(lay.n));
  for (Eigen::Index i = 0; i < bob.size(); ++i) {
    Complex<Real> acc(0);
    for (Eigen::Index c = 0; c < cols; ++c) acc += std::conj(element.amplitudes()(c)) * ordered.amplitudes()(i * cols + c);
    bob(i) = acc;
  }
  return {bob.squaredNorm(), std::move(bob)};
}

template <typename Real = double>
struct BranchCheck {
  Real max_deviation = 0;
  bool partial = false;  // basis incomplete: compared against its span only
};

/// Rebuilds sum_r |phi^r>_{Aa} (x) sigma^r |chi>_B from the algebraic route and
/// compares it with the system vector. For an incomplete basis any mass
/// outside the span shows up as deviation.
template <typename Real>
BranchCheck<Real> verify_branch_decomposition(const ComposedSystem<Real>& sys, const ChannelMatrix<Real>& c,
                                              const MeasurementBasis<Real>& basis, const PureState<Real>& unknown) {
  const auto& lay = sys.layout;
  if (basis.m != lay.m || basis.n != lay.n) throw DimensionError("basis does not match the system layout");
  CVector<Real> rebuilt = CVector<Real>::Zero(static_cast<Eigen::Index>(sys.state.size()));
  // Accumulate in (A..., a..., B...) order, then permute into system order.
  const auto nn = static_cast<Eigen::Index>(lay.n);
  for (const auto& mm : measurement_matrices(basis)) {
    const CVector<Real> bob = collapsed_matrix(c, mm).entries * unknown.amplitudes();
    const CVector<Real>& phi = basis.elements[mm.outcome_id].amplitudes();
    for (Eigen::Index q = 0; q < phi.size(); ++q) rebuilt.segment(q * nn, nn) += phi(q) * bob;
  }
  std::vector<Index> order = lay.alice_system_slots();
  for (Index s : lay.unknown_system_slots()) order.push_back(s);
  for (Index s : lay.bob_system_slots()) order.push_back(s);
  const QuditDims in_order = sys.state.dims().select(order);
  const PureState<Real> rebuilt_state(in_order, rebuilt);
  const auto back = permute_particles(rebuilt_state, inverse_permutation(order));
  return {max_abs(back.amplitudes() - sys.state.amplitudes()), !basis.complete()};
}

/// Bob's correction U^H, where sigma = U P is the polar decomposition.
template <typename Real>
CMatrix<Real> correction_operator(const CollapsedMatrix<Real>& sigma) {
  if (sigma.entries.rows() != sigma.entries.cols()) throw DimensionError("collapsed matrix must be square");
  if (!(max_abs(sigma.entries) > Real(0))) throw DegenerateStateError("no correction for a zero collapsed matrix");
  Eigen::JacobiSVD<CMatrix<Real>> svd(sigma.entries, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CMatrix<Real> u = svd.matrixU() * svd.matrixV().adjoint();
  return u.adjoint();
}

template <typename Real = double>
struct OutcomeRecord {
  Index outcome_id = 0;
  Real probability = 0;
  CVector<Real> bob_state_raw;
  CollapsedMatrix<Real> sigma_prediction;
  Real corrected_fidelity = 1;
  bool unreached = false;
};

template <typename Real = double>
struct InputRun {
  CVector<Real> input;
  std::vector<OutcomeRecord<Real>> outcomes;
  Real total_probability = 0;
  Real average_fidelity = 0;  // sum_r p_r F_r
};

template <typename Real = double>
struct OutcomeSummary {
  Index outcome_id = 0;
  Real mean_probability = 0;
  Real min_fidelity = 1;
  Real max_fidelity = 1;
  ScaledUnitary<Real> unitarity;
  bool ever_reached = false;
};

template <typename Real = double>
struct SimulationReport {
  std::string input_description;
  std::vector<InputRun<Real>> runs;
  std::vector<OutcomeSummary<Real>> outcomes;
  Real average_fidelity = 0;  // mean over runs
  Real min_fidelity = 1;      // worst run
};

/// Normalized vector of independent standard complex Gaussians, i.e. a
/// Haar-random pure state. Generator: std::mt19937_64.
template <typename Real>
CVector<Real> haar_random_vector(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<Real> gauss(Real(0), Real(1));
  CVector<Real> v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Real re = gauss(rng);
    const Real im = gauss(rng);
    v(i) = Complex<Real>(re, im);
  }
  return v / v.norm();
}

template <typename Real>
std::vector<CVector<Real>> haar_random_inputs(Index dim, Index samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CVector<Real>> out;
  out.reserve(samples);
  for (Index s = 0; s < samples; ++s) out.push_back(haar_random_vector<Real>(dim, rng));
  return out;
}

namespace detail {

template <typename Real>
InputRun<Real> teleport_once(const PureState<Real>& unknown, const PureState<Real>& channel,
                             const Bipartition& partition, const MeasurementBasis<Real>& basis,
                             const std::vector<CollapsedMatrix<Real>>& sigmas,
                             const std::vector<CMatrix<Real>>& corrections, const Tolerances<Real>& tol) {
  const auto sys = compose_system(unknown, channel, partition);
  const CVector<Real>& x = unknown.amplitudes();
  InputRun<Real> run;
  run.input = x;
  for (Index r = 0; r < basis.size(); ++r) {
    auto branch = project_outcome(sys, basis.elements[r]);
    OutcomeRecord<Real> rec;
    rec.outcome_id = r;
    rec.probability = branch.probability;
    rec.sigma_prediction = sigmas[r];
    if (branch.probability <= tol.probability || corrections[r].size() == 0) {
      rec.unreached = true;
      rec.corrected_fidelity = 1;
    } else {
      const CVector<Real> corrected = corrections[r] * branch.bob_state_raw;
      rec.corrected_fidelity = std::norm(x.dot(corrected)) / branch.probability;
      run.average_fidelity += rec.probability * rec.corrected_fidelity;
    }
    run.total_probability += rec.probability;
    rec.bob_state_raw = std::move(branch.bob_state_raw);
    run.outcomes.push_back(std::move(rec));
  }
  return run;
}

}  // namespace detail

/// Teleports each input in turn. Inputs are fixed up front, so the report is
/// a pure function of (inputs, channel, partition, basis, tolerances).
template <typename Real>
SimulationReport<Real> run_teleportation(const std::vector<PureState<Real>>& inputs, const PureState<Real>& channel,
                                         const Bipartition& partition, const MeasurementBasis<Real>& basis,
                                         const Tolerances<Real>& tol = {}, std::string description = {}) {
  validate_basis(basis, Real(1e-9));
  const auto c = build_channel_matrix(channel, partition);
  if (basis.m != c.m || basis.n != c.n) throw DimensionError("basis does not match the channel partition");

  std::vector<CollapsedMatrix<Real>> sigmas;
  std::vector<CMatrix<Real>> corrections;
  SimulationReport<Real> rep;
  rep.input_description = std::move(description);
  for (const auto& mm : measurement_matrices(basis)) {
    sigmas.push_back(collapsed_matrix(c, mm));
    const bool zero = numerical_rank(sigmas.back().entries, tol.rank) == 0;
    corrections.push_back(zero ? CMatrix<Real>() : correction_operator(sigmas.back()));
    OutcomeSummary<Real> s;
    s.outcome_id = mm.outcome_id;
    s.unitarity = is_scaled_unitary(sigmas.back().entries, tol.unitary);
    rep.outcomes.push_back(s);
  }

  for (const auto& in : inputs) {
    rep.runs.push_back(detail::teleport_once(in, channel, partition, basis, sigmas, corrections, tol));
  }
  if (rep.runs.empty()) return rep;

  Real total = 0;
  for (const auto& run : rep.runs) {
    total += run.average_fidelity;
    rep.min_fidelity = std::min(rep.min_fidelity, run.average_fidelity);
    for (const auto& rec : run.outcomes) {
      auto& s = rep.outcomes[rec.outcome_id];
      s.mean_probability += rec.probability / Real(rep.runs.size());
      if (rec.unreached) continue;
      s.min_fidelity = s.ever_reached ? std::min(s.min_fidelity, rec.corrected_fidelity) : rec.corrected_fidelity;
      s.max_fidelity = s.ever_reached ? std::max(s.max_fidelity, rec.corrected_fidelity) : rec.corrected_fidelity;
      s.ever_reached = true;
    }
  }
  rep.average_fidelity = total / Real(rep.runs.size());
  return rep;
}

template <typename Real>
SimulationReport<Real> run_teleportation(const PureState<Real>& unknown, const PureState<Real>& channel,
                                         const Bipartition& partition, const MeasurementBasis<Real>& basis,
                                         const Tolerances<Real>& tol = {}) {
  return run_teleportation(std::vector<PureState<Real>>{unknown}, channel, partition, basis, tol,
                           "single input");
}

/// `samples` Haar-random inputs of the given dims drawn from `seed`.
template <typename Real>
SimulationReport<Real> run_teleportation(const QuditDims& unknown_dims, Index samples, std::uint64_t seed,
                                         const PureState<Real>& channel, const Bipartition& partition,
                                         const MeasurementBasis<Real>& basis, const Tolerances<Real>& tol = {}) {
  if (samples < 1) throw DimensionError("random simulation needs at least one sample");
  std::vector<PureState<Real>> inputs;
  for (auto& v : haar_random_inputs<Real>(unknown_dims.total(), samples, seed)) {
    inputs.emplace_back(unknown_dims, std::move(v), true);
  }
  return run_teleportation(inputs, channel, partition, basis, tol,
                           std::to_string(samples) + " Haar-random inputs, seed " + std::to_string(seed));
}

/// Random inputs drawn from the column span of `subspace` (orthonormal n x d).
template <typename Real>
std::vector<CVector<Real>> random_inputs_in(const CMatrix<Real>& subspace, Index samples, std::uint64_t seed) {
  std::vector<CVector<Real>> out;
  for (auto& y : haar_random_inputs<Real>(static_cast<Index>(subspace.cols()), samples, seed)) {
    CVector<Real> x = subspace * y;
    out.push_back(x / x.norm());
  }
  return out;
}

}  // namespace telemat
