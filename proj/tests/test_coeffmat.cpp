#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "support.hpp"
#include "telemat/coeffmat.hpp"

using namespace telemat;
using namespace telemat::testing;

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MeasurementBasis<double> basis_of(std::vector<State> elems, Index m, Index n) { return {std::move(elems), m, n}; }

}  // namespace

TEST(Bipartition, Validation) {
  EXPECT_NO_THROW((Bipartition{{1}, {0}}.validate(2)));
  EXPECT_THROW((Bipartition{{0}, {0, 1}}.validate(2)), InvalidPartition);
  EXPECT_THROW((Bipartition{{}, {0, 1}}.validate(2)), InvalidPartition);
  EXPECT_THROW((Bipartition{{0}, {1}}.validate(3)), InvalidPartition);
  EXPECT_THROW((Bipartition{{0}, {5}}.validate(2)), InvalidPartition);
}

TEST(ChannelMatrix, EprWithBobListedFirst) {
  // particle 1 with Alice, particle 2 with Bob
  const auto c = build_channel_matrix(epr_ab(), Bipartition{{1}, {0}});
  EXPECT_EQ(c.n, 2u);
  EXPECT_EQ(c.m, 2u);
  EXPECT_LT(max_dev(c.entries, kInvSqrt2 * Mat::Identity(2, 2)), 1e-12);
}

TEST(ChannelMatrix, GeneralTwoQubitOrdering) {
  // |psi>_AB = a0|00> + a1|01> + a2|10> + a3|11>  ->  C = [[a0, a2], [a1, a3]]
  Vec a(4);
  a << cd(0.5), cd(0.1, 0.5), cd(-0.5, 0.1), cd(0.3, -0.38);
  const State ab(QuditDims({2, 2}, {"A", "B"}), a);
  const auto c = build_channel_matrix(ab, Bipartition{{1}, {0}});
  EXPECT_EQ(c.entries, mat({{a(0), a(2)}, {a(1), a(3)}}));
}

TEST(ChannelMatrix, WState) {
  const cd a2(0.5), a4(0.5);
  const auto c = build_channel_matrix(w_state(a2, a4), Bipartition{{2}, {0, 1}});
  const double h = std::sqrt(2.0) / 2;
  EXPECT_EQ(c.n, 2u);
  EXPECT_EQ(c.m, 4u);
  EXPECT_LT(max_dev(c.entries, mat({{0., a2, a4, 0.}, {h, 0., 0., 0.}})), 1e-12);
}

TEST(ChannelMatrix, YeoChuaBothPartitions) {
  const auto c12 = build_channel_matrix(yeo_chua(), Bipartition{{0, 1}, {2, 3}});
  EXPECT_LT(max_dev(c12.entries, kYC * mat({{1., 0., 0., -1.}, {0., -1., 1., 0.}, {0., 1., 1., 0.}, {1., 0., 0., 1.}})),
            1e-12);
  const auto c14 = build_channel_matrix(yeo_chua(), Bipartition{{0, 3}, {1, 2}});
  EXPECT_LT(max_dev(c14.entries, kYC * mat({{1., 0., 0., 1.}, {0., -1., -1., 0.}, {0., 1., 1., 0.}, {1., 0., 0., 1.}})),
            1e-12);
}

TEST(ChannelMatrix, MatchesDigitLoopOracle) {
  std::mt19937_64 rng(5);
  const QuditDims d({2, 3, 2, 4}, {"p", "q", "r", "s"});
  const std::vector<Bipartition> parts{{{0}, {1, 2, 3}}, {{3, 1}, {0, 2}}, {{2, 0, 3}, {1}}, {{1, 3}, {2, 0}}};
  for (const auto& p : parts) {
    const auto s = random_state(d, rng);
    const auto c = build_channel_matrix(s, p);
    EXPECT_EQ(c.entries, channel_matrix_oracle(s, p));
    // row-major flattening recovers the reordered state
    const auto ordered = permute_particles(s, p.ordering());
    for (Eigen::Index i = 0; i < c.entries.rows(); ++i)
      for (Eigen::Index j = 0; j < c.entries.cols(); ++j)
        ASSERT_EQ(c.entries(i, j), ordered[static_cast<Index>(i * c.entries.cols() + j)]);
  }
}

TEST(ChannelMatrix, NormalizedChannelHasUnitFrobeniusNorm) {
  EXPECT_NEAR(build_channel_matrix(yeo_chua(), Bipartition{{0, 3}, {1, 2}}).entries.squaredNorm(), 1.0, 1e-9);
}

TEST(ChannelMatrix, InvalidPartitionRejected) {
  EXPECT_THROW(build_channel_matrix(epr_ab(), Bipartition{{0}, {0}}), InvalidPartition);
}

TEST(MeasurementMatrix, BellElements) {
  const auto bell = bell_states();
  const double r = kInvSqrt2;
  const std::vector<Mat> expect{r * mat({{1., 0.}, {0., 1.}}), r * mat({{1., 0.}, {0., -1.}}),
                                r * mat({{0., 1.}, {1., 0.}}), r * mat({{0., 1.}, {-1., 0.}})};
  for (Index k = 0; k < 4; ++k) {
    EXPECT_LT(max_dev(build_measurement_matrix(bell[k], 2, 2).entries, expect[k]), 1e-12) << "element " << k;
  }
}

TEST(MeasurementMatrix, WBasisElements) {
  const cd a2(0.5), a4(0.5);
  const double h = std::sqrt(2.0) / 2;
  const auto basis = w_basis(a2, a4);
  const std::vector<Mat> expect{mat({{0., h}, {a2, 0.}, {a4, 0.}, {0., 0.}}), mat({{0., -h}, {a2, 0.}, {a4, 0.}, {0., 0.}}),
                                mat({{h, 0.}, {0., a2}, {0., a4}, {0., 0.}}), mat({{-h, 0.}, {0., a2}, {0., a4}, {0., 0.}})};
  for (Index k = 0; k < 4; ++k) {
    const auto mm = build_measurement_matrix(basis[k], 4, 2, k);
    EXPECT_EQ(mm.outcome_id, k);
    EXPECT_LT(max_dev(mm.entries, expect[k]), 1e-12) << "element " << k;
    EXPECT_NEAR(mm.entries.squaredNorm(), 1.0, 1e-9);
  }
}

TEST(MeasurementMatrix, DimensionMismatch) {
  EXPECT_THROW(build_measurement_matrix(bell_states()[0], 4, 2), DimensionError);
}

TEST(CollapsedMatrix, WChannelWithVonNeumannBasis) {
  const cd a2(0.5), a4(0.5);
  const auto c = build_channel_matrix(w_state(a2, a4), Bipartition{{2}, {0, 1}});
  const auto basis = w_basis(a2, a4);
  const std::vector<Mat> expect{0.5 * mat({{1., 0.}, {0., 1.}}), 0.5 * mat({{1., 0.}, {0., -1.}}),
                                0.5 * mat({{0., 1.}, {1., 0.}}), 0.5 * mat({{0., 1.}, {-1., 0.}})};
  for (Index k = 0; k < 4; ++k) {
    const auto sigma = collapsed_matrix(c, build_measurement_matrix(basis[k], 4, 2, k));
    EXPECT_LT(max_dev(sigma.entries, expect[k]), 1e-12) << "outcome " << k;
  }
}

TEST(CollapsedMatrix, EprWithBellBasisByHand) {
  // (1/sqrt2) I times conj of each (1/sqrt2) Bell matrix, multiplied out by hand.
  const auto c = build_channel_matrix(epr_ab(), Bipartition{{1}, {0}});
  const std::vector<Mat> expect{mat({{0.5, 0.}, {0., 0.5}}), mat({{0.5, 0.}, {0., -0.5}}), mat({{0., 0.5}, {0.5, 0.}}),
                                mat({{0., 0.5}, {-0.5, 0.}})};
  const auto bell = bell_states();
  for (Index k = 0; k < 4; ++k) {
    EXPECT_LT(max_dev(collapsed_matrix(c, build_measurement_matrix(bell[k], 2, 2)).entries, expect[k]), 1e-12);
  }
}

TEST(CollapsedMatrix, ConjugatesEntrywiseWithoutTranspose) {
  ChannelMatrix<double> c{mat({{1., 0.}, {0., 0.}}), 2, 2, {}};
  MeasurementMatrix<double> m{mat({{0., cd(0, 1)}, {0., 0.}}), 0};
  // C * conj(M) = [[0, -i], [0, 0]]; a transpose would move the entry.
  EXPECT_EQ(collapsed_matrix(c, m).entries, mat({{0., cd(0, -1)}, {0., 0.}}));
}

TEST(CollapsedMatrix, ZeroMeasurementGivesZero) {
  const auto c = build_channel_matrix(yeo_chua(), Bipartition{{0, 1}, {2, 3}});
  MeasurementMatrix<double> zero{Mat::Zero(4, 4), 0};
  EXPECT_EQ(collapsed_matrix(c, zero).entries, Mat::Zero(4, 4));
}

TEST(CollapsedMatrix, DimensionMismatch) {
  const auto c = build_channel_matrix(w_state(0.5, 0.5), Bipartition{{2}, {0, 1}});
  MeasurementMatrix<double> wrong{Mat::Zero(2, 2), 0};
  EXPECT_THROW(collapsed_matrix(c, wrong), DimensionError);
}

TEST(NumericalRank, PaperMatrices) {
  EXPECT_EQ(numerical_rank(build_channel_matrix(yeo_chua(), Bipartition{{0, 1}, {2, 3}}).entries, 1e-10), 4u);
  EXPECT_EQ(numerical_rank(build_channel_matrix(yeo_chua(), Bipartition{{0, 3}, {1, 2}}).entries, 1e-10), 2u);
  EXPECT_EQ(numerical_rank(Mat::Zero(3, 2), 1e-10), 0u);
  EXPECT_THROW(numerical_rank(Mat(0, 0), 1e-10), DimensionError);
}

TEST(NumericalRank, ProductChannelHasRankOne) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const auto bob = random_state(QuditDims({2, 3}, {"b1", "b2"}), rng);
    const auto alice = random_state(QuditDims({2, 2}, {"x", "y"}), rng);
    const auto c = build_channel_matrix(tensor_product(bob, alice), Bipartition{{0, 1}, {2, 3}});
    ASSERT_EQ(numerical_rank(c.entries, 1e-10), 1u);
  }
}

TEST(NumericalRank, AgreesWithEliminationOracle) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    const Index rows = 2 + rng() % 4, cols = 2 + rng() % 4;
    const Index r = rng() % (std::min(rows, cols) + 1);
    const Mat a = random_rank_matrix(rows, cols, r, rng);
    ASSERT_EQ(numerical_rank(a, 1e-10), r);
    ASSERT_EQ(rank_oracle(a), r);
  }
}

TEST(ScaledUnitary, Examples) {
  const auto rot = is_scaled_unitary(0.5 * mat({{0., 1.}, {-1., 0.}}), 1e-9);
  EXPECT_TRUE(rot.scaled_unitary);
  EXPECT_NEAR(rot.k, 0.5, 1e-12);

  const auto yc = is_scaled_unitary(build_channel_matrix(yeo_chua(), Bipartition{{0, 1}, {2, 3}}).entries, 1e-9);
  // The displayed 1/(2 sqrt2) prefactor multiplies rows of norm sqrt2, so
  // k = sqrt(tr(C C^H) / 4) = 1/2 for this normalized channel.
  EXPECT_TRUE(yc.scaled_unitary);
  EXPECT_NEAR(yc.k, 0.5, 1e-12);

  const auto deficient = is_scaled_unitary(mat({{1., 0.}, {0., 0.}}), 1e-9);
  EXPECT_FALSE(deficient.scaled_unitary);
  EXPECT_NEAR(deficient.k, kInvSqrt2, 1e-12);

  EXPECT_FALSE(is_scaled_unitary(Mat::Zero(3, 3), 1e-9).scaled_unitary);
  EXPECT_THROW(is_scaled_unitary(Mat::Zero(2, 3), 1e-9), DimensionError);
}

TEST(ScaledUnitary, ImpliesFullRank) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + rng() % 4;
    const Mat candidate = (t % 2) ? Mat(0.37 * random_unitary(n, rng)) : random_matrix(n, n, rng);
    const auto su = is_scaled_unitary(candidate, 1e-9);
    if (t % 2) EXPECT_TRUE(su.scaled_unitary);
    if (su.scaled_unitary) {
      EXPECT_EQ(numerical_rank(candidate, 1e-10), n);
      EXPECT_LT(max_dev(candidate.adjoint() * candidate / (su.k * su.k), Mat::Identity(n, n)), 1e-8);
    }
  }
}

TEST(RankProduct, NeverExceedsFactorRanks) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    const Index n = 2 + rng() % 3, m = 2 + rng() % 3;
    const Mat c = random_rank_matrix(n, m, rng() % (std::min(n, m) + 1), rng);
    const Mat mm = random_rank_matrix(m, n, rng() % (std::min(n, m) + 1), rng);
    const Index rc = numerical_rank(c, 1e-10);
    const Index rm = numerical_rank(mm, 1e-10);
    const Index rs = numerical_rank(Mat(c * mm.conjugate()), 1e-10);
    ASSERT_LE(rs, std::min(rc, rm));
  }
}

TEST(RankProduct, EqualityFailsInGeneral) {
  // The product rank can fall strictly below min(r_c, r_m).
  const Mat c = mat({{1., 0.}, {0., 0.}});
  const Mat conj_m = mat({{0., 0.}, {1., 0.}});
  EXPECT_EQ(numerical_rank(c, 1e-10), 1u);
  EXPECT_EQ(numerical_rank(conj_m, 1e-10), 1u);
  EXPECT_EQ(numerical_rank(Mat(c * conj_m), 1e-10), 0u);
}

TEST(LocalUnitaries, TransformChannelMatrixAndKeepRank) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 200; ++t) {
    const Index n = 2 + rng() % 3, m = 2 + rng() % 3;
    const Index r = 1 + rng() % std::min(n, m);
    Mat coeffs = random_rank_matrix(n, m, r, rng);
    coeffs /= coeffs.norm();
    // state on (B, A) with amplitude index i*m + j
    Vec amps(static_cast<Eigen::Index>(n * m));
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j) amps(static_cast<Eigen::Index>(i * m + j)) = coeffs(i, j);
    const State psi(QuditDims({n, m}), amps, true);
    const Mat ub = random_unitary(n, rng), ua = random_unitary(m, rng);
    const State moved(QuditDims({n, m}), kron(ub, ua) * amps, true);

    const Bipartition p{{0}, {1}};
    const auto c = build_channel_matrix(psi, p);
    const auto c2 = build_channel_matrix(moved, p);
    ASSERT_LT(max_dev(c2.entries, ub * c.entries * ua.transpose()), 1e-12);
    ASSERT_EQ(numerical_rank(c2.entries, 1e-10), numerical_rank(c.entries, 1e-10));
    ASSERT_EQ(numerical_rank(c.entries, 1e-10), r);
  }
}

TEST(CompletenessSum, CompleteAndTruncatedBases) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const Index n = 2 + rng() % 2, m = 2 + rng() % 3;
    const auto channel = random_state(QuditDims({n, m}), rng);
    const auto c = build_channel_matrix(channel, Bipartition{{0}, {1}});
    auto elems = random_basis(QuditDims({m, n}), rng);
    Mat sum = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& mm : measurement_matrices(basis_of(elems, m, n))) {
      const Mat s = collapsed_matrix(c, mm).entries;
      sum += s.adjoint() * s;
    }
    EXPECT_LT(max_dev(sum, Mat::Identity(sum.rows(), sum.cols())), 1e-9);

    elems.resize(elems.size() / 2);
    Mat partial = Mat::Zero(sum.rows(), sum.cols());
    for (const auto& mm : measurement_matrices(basis_of(elems, m, n))) {
      const Mat s = collapsed_matrix(c, mm).entries;
      partial += s.adjoint() * s;
    }
    const Mat gap = Mat::Identity(sum.rows(), sum.cols()) - partial;
    Eigen::SelfAdjointEigenSolver<Mat> es(gap);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(BasisValidation, BellIsCompleteOrthonormal) {
  const auto rep = validate_basis(basis_of(bell_states(), 2, 2));
  EXPECT_TRUE(rep.orthonormal);
  EXPECT_TRUE(rep.complete);
  EXPECT_LT(rep.max_deviation, 1e-12);
}

TEST(BasisValidation, WBasisIsOrthonormalButIncomplete) {
  const cd a2(0.3, 0.4), a4(std::sqrt(0.25));
  const auto elems = w_basis(a2, a4);
  // six pairwise overlaps by explicit summation
  for (Index r = 0; r < 4; ++r) {
    for (Index s = r + 1; s < 4; ++s) {
      cd acc = 0;
      for (Index i = 0; i < 8; ++i) acc += std::conj(elems[r][i]) * elems[s][i];
      EXPECT_LT(std::abs(acc), 1e-12) << r << "," << s;
    }
  }
  const auto rep = validate_basis(basis_of(elems, 4, 2));
  EXPECT_TRUE(rep.orthonormal);
  EXPECT_FALSE(rep.complete);
  EXPECT_EQ(rep.count, 4u);
  EXPECT_EQ(rep.space_dim, 8u);
}

TEST(BasisValidation, RepeatedElementFailsNamingThePair) {
  const auto zero = State::basis(QuditDims({2, 2}), {0, 0});
  const auto b = basis_of({zero, zero}, 2, 2);
  EXPECT_FALSE(check_basis(b).orthonormal);
  try {
    validate_basis(b);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,1)"), std::string::npos) << e.what();
  }
}
