#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qhmm/qhmm.hpp"

using namespace qhmm;

namespace {

Qhmm identity_channel() {
  Eigen::MatrixXcd k(1, 1), rho(1, 1);
  k << 1.0;
  rho << 1.0;
  return Qhmm(Alphabet::numeric(1), {{k}}, rho);
}

}  // namespace

TEST(ValidateClassical, PaperExampleIsValid) {
  const auto t = oracle::example_matrices(0.5, 0.5, 2.0 / 3.0, 1.0 / 6.0);
  // Column sums by hand: (0.5+0.5, 0.5+0.5, 2/3+1/6+1/6).
  const Eigen::RowVectorXd sums = (t[0] + t[1]).colwise().sum();
  EXPECT_NEAR(sums.maxCoeff(), 1.0, 1e-15);
  EXPECT_NEAR(sums.minCoeff(), 1.0, 1e-15);
  ClassicalHmm m(Alphabet::numeric(2), t, Eigen::Vector3d(1, 0, 0));
  EXPECT_TRUE(validate_classical(m).valid());
}

TEST(ValidateClassical, CoinIsValid) {
  EXPECT_TRUE(validate_classical(oracle::coin(0.5)).valid());
}

TEST(ValidateClassical, OverfullColumnReportsResidual) {
  Eigen::MatrixXd t(1, 1);
  t << 0.6;
  ClassicalHmm m(Alphabet::numeric(2), {t, t}, Eigen::VectorXd::Ones(1));
  const auto report = validate_classical(m);
  EXPECT_FALSE(report.valid());
  ASSERT_EQ(report.violations().size(), 1u);
  EXPECT_EQ(report.violations()[0].name, "column_stochastic");
  EXPECT_NEAR(report.residual("column_stochastic"), 0.2, 1e-12);
}

TEST(ValidateClassical, NegativeInitialAndBadSumsAreReported) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2, 2);
  ClassicalHmm m(Alphabet::numeric(1), {t}, Eigen::Vector2d(1.2, -0.1));
  const auto report = validate_classical(m);
  EXPECT_NEAR(report.residual("initial_nonnegative"), 0.1, 1e-12);
  EXPECT_NEAR(report.residual("initial_normalized"), 0.1, 1e-12);
}

TEST(ValidateClassical, DimensionMismatchThrows) {
  EXPECT_THROW(ClassicalHmm(Alphabet::numeric(2), {Eigen::MatrixXd::Identity(2, 2)}, Eigen::Vector2d(1, 0)),
               DimensionError);
  EXPECT_THROW(ClassicalHmm(Alphabet::numeric(1), {Eigen::MatrixXd::Identity(2, 2)}, Eigen::Vector3d(1, 0, 0)),
               DimensionError);
  EXPECT_THROW(ClassicalHmm(Alphabet::numeric(1), {Eigen::MatrixXd::Identity(2, 3)}, Eigen::Vector2d(1, 0)),
               DimensionError);
}

TEST(ValidateQuantum, IdentityChannelAndCoinAreValid) {
  EXPECT_TRUE(validate_quantum(identity_channel()).valid());
  EXPECT_TRUE(validate_quantum(oracle::quantum_coin(0.5)).valid());
}

TEST(ValidateQuantum, DoubledIdentityHasCptpResidualOne) {
  Eigen::MatrixXcd k(1, 1), rho(1, 1);
  k << 1.0;
  rho << 1.0;
  Qhmm m(Alphabet::numeric(2), {{k}, {k}}, rho);
  const auto report = validate_quantum(m);
  EXPECT_FALSE(report.valid());
  EXPECT_NEAR(report.residual("cptp"), 1.0, 1e-12);
}

TEST(ValidateQuantum, BadInitialStatesAreFlagged) {
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::MatrixXcd rho(2, 2);
  rho << 1.5, 0, 0, -0.5;  // Hermitian, trace one, not PSD
  EXPECT_NEAR(validate_quantum(Qhmm(Alphabet::numeric(1), {{k}}, rho)).residual("initial_psd"), 0.5, 1e-12);
  rho << 0.5, Complex(0, 0.3), 0, 0.5;
  EXPECT_FALSE(validate_quantum(Qhmm(Alphabet::numeric(1), {{k}}, rho)).valid());
}

TEST(ValidateQuantum, DimensionMismatchThrows) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
  EXPECT_THROW(Qhmm(Alphabet::numeric(1), {{Eigen::MatrixXcd::Identity(3, 3)}}, rho), DimensionError);
  EXPECT_THROW(Qhmm(Alphabet::numeric(2), {{Eigen::MatrixXcd::Identity(2, 2)}}, rho), DimensionError);
}

TEST(SioEmbed, CoinGivesSquareRootWeights) {
  const Qhmm q = sio_embed(oracle::coin(0.5));
  ASSERT_EQ(q.dim(), 1u);
  ASSERT_EQ(q.kraus(0).size(), 1u);
  EXPECT_NEAR(std::abs(q.kraus(0)[0](0, 0) - std::sqrt(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(q.kraus(1)[0](0, 0) - std::sqrt(0.5)), 0.0, 1e-15);
}

TEST(SioEmbed, PaperModelMatchesAllLengthFourWords) {
  const auto c = example_model_family(0.5, 0.5, ExampleBranch::quantum_reduction);
  const Qhmm q = sio_embed(c);
  EXPECT_EQ(q.dim(), 3u);
  EXPECT_TRUE(validate_quantum(q).valid());
  const Eigen::MatrixXcd expected_rho = c.initial().cast<Complex>().asDiagonal();
  EXPECT_LT((q.initial() - expected_rho).norm(), 1e-15);
  for (const auto& w : oracle::all_words(2, 4)) {
    EXPECT_NEAR(oracle::kraus_trace(q, w).real(), oracle::path_sum(c, w), 1e-12);
  }
}

TEST(SioEmbed, ZeroEntriesProduceNoOperator) {
  const auto c = example_model_family(0.3, 0.7, ExampleBranch::quantum_reduction);
  const Qhmm q = sio_embed(c);
  for (std::size_t x = 0; x < 2; ++x) {
    const auto nonzero = static_cast<std::size_t>((c.transition(x).array() > 0.0).count());
    EXPECT_EQ(q.kraus(x).size(), nonzero);
    for (const auto& k : q.kraus(x)) EXPECT_EQ((k.array().abs() > 0.0).count(), 1);
  }
}

TEST(SioEmbed, PhasesDoNotChangeStatistics) {
  const auto c = random_classical_hmm(3, 2, 11);
  const Qhmm plain = sio_embed(c);
  const Qhmm phased = sio_embed(c, PhaseAssignment::random(5));
  for (const auto& w : oracle::all_words(2, 5)) {
    EXPECT_NEAR(oracle::kraus_trace(plain, w).real(), oracle::kraus_trace(phased, w).real(), 1e-12);
  }
}

TEST(SioEmbed, RandomModelsAgreeUpToLengthSix) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto c = random_classical_hmm(2 + seed % 3, 2, seed, seed % 2 ? 0.3 : 0.0);
    const Qhmm q = sio_embed(c);
    for (std::size_t l = 1; l <= 6; ++l) {
      for (const auto& w : oracle::all_words(2, l)) {
        ASSERT_NEAR(oracle::kraus_trace(q, w).real(), oracle::path_sum(c, w), 1e-10);
      }
    }
  }
}

TEST(ExampleFamily, QuantumBranchAtHalf) {
  const auto g = example_gammas(0.5, 0.5, ExampleBranch::quantum_reduction);
  EXPECT_NEAR(g.nu * g.nu, 3.0, 1e-14);
  EXPECT_NEAR(g.gamma1, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(g.gamma2, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(g.gamma_bar, 1.0 / 6.0, 1e-15);
}

TEST(ExampleFamily, ClassicalBranchAtHalf) {
  const auto g = example_gammas(0.5, 0.5, ExampleBranch::classical_reduction);
  EXPECT_NEAR(g.gamma1, 0.5, 1e-15);
  EXPECT_NEAR(g.gamma2, 0.25, 1e-15);
  EXPECT_NEAR(g.gamma_bar, 0.25, 1e-15);
}

TEST(ExampleFamily, MatchesPrintedMatricesAndClosedForms) {
  for (double a : {0.1, 0.37, 0.5, 0.9}) {
    for (double b : {0.05, 0.5, 0.81}) {
      const auto q = oracle::quantum_branch(a, b);
      const auto c = oracle::classical_branch(a, b);
      const auto gq = example_gammas(a, b, ExampleBranch::quantum_reduction);
      const auto gc = example_gammas(a, b, ExampleBranch::classical_reduction);
      EXPECT_NEAR(gq.gamma1, q.g1, 1e-14);
      EXPECT_NEAR(gq.gamma2, q.g2, 1e-14);
      EXPECT_NEAR(gq.gamma_bar, q.gb, 1e-14);
      EXPECT_NEAR(gc.gamma1, c.g1, 1e-14);
      EXPECT_NEAR(gc.gamma_bar, c.gb, 1e-14);
      for (auto branch : {ExampleBranch::quantum_reduction, ExampleBranch::classical_reduction}) {
        const auto g = example_gammas(a, b, branch);
        EXPECT_NEAR(g.gamma1 + g.gamma2 + g.gamma_bar, 1.0, 1e-12);
        const auto m = example_model_family(a, b, branch);
        EXPECT_TRUE(validate_classical(m).valid());
        const auto t = oracle::example_matrices(a, b, g.gamma1, g.gamma2);
        EXPECT_LT((m.transition(0) - t[0]).norm(), 1e-15);
        EXPECT_LT((m.transition(1) - t[1]).norm(), 1e-15);
        EXPECT_LT(((m.total_transition()).colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(ExampleFamily, DefaultInitialIsStationary) {
  const auto m = example_model_family(0.4, 0.6, ExampleBranch::quantum_reduction);
  EXPECT_LT((m.total_transition() * m.initial() - m.initial()).norm(), 1e-13);
  EXPECT_NEAR(m.initial().sum(), 1.0, 1e-14);
}

TEST(ExampleFamily, RejectsBoundaryParameters) {
  for (double bad : {0.0, 1.0, -0.2, 1.5, std::nan("")}) {
    EXPECT_THROW(example_model_family(bad, 0.5, ExampleBranch::quantum_reduction), DomainError);
    EXPECT_THROW(example_model_family(0.5, bad, ExampleBranch::classical_reduction), DomainError);
  }
}

TEST(RandomQhmm, ValidAndDeterministic) {
  const Qhmm a = random_qhmm(2, 2, 1, 7);
  const Qhmm b = random_qhmm(2, 2, 1, 7);
  EXPECT_TRUE(validate_quantum(a).valid());
  EXPECT_EQ(a.initial(), b.initial());
  for (std::size_t x = 0; x < 2; ++x) EXPECT_EQ(a.kraus(x)[0], b.kraus(x)[0]);
  EXPECT_NE(random_qhmm(2, 2, 1, 8).initial(), a.initial());
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_TRUE(validate_quantum(random_qhmm(1 + s % 4, 1 + s % 3, 1 + s % 2, s)).valid());
  }
}

TEST(RandomQhmm, OneDimensionalIsIdentityChannel) {
  const Qhmm m = random_qhmm(1, 1, 1, 99);
  EXPECT_NEAR(std::abs(m.kraus(0)[0](0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(m.initial()(0, 0).real(), 1.0, 1e-12);
}

TEST(RandomClassical, ValidDeterministicAndSparse) {
  const auto a = random_classical_hmm(4, 3, 21, 0.5);
  const auto b = random_classical_hmm(4, 3, 21, 0.5);
  EXPECT_TRUE(validate_classical(a).valid());
  EXPECT_EQ(a.transition(1), b.transition(1));
  std::size_t zeros = 0;
  for (std::size_t x = 0; x < 3; ++x) zeros += static_cast<std::size_t>((a.transition(x).array() == 0.0).count());
  EXPECT_GT(zeros, 0u);
}

TEST(Conjugation, IdentityLeavesModelUnchanged) {
  const Qhmm m = random_qhmm(3, 2, 2, 3);
  const Qhmm c = conjugate_by_unitary(m, Eigen::MatrixXcd::Identity(3, 3));
  EXPECT_LT((c.initial() - m.initial()).norm(), 1e-15);
  EXPECT_LT((c.kraus(1)[1] - m.kraus(1)[1]).norm(), 1e-15);
}

TEST(Conjugation, PreservesValidityAndWords) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const std::size_t d = 2 + s % 2;
    const Qhmm m = random_qhmm(d, 2, 1 + s % 2, s);
    const auto u = random_unitary(d, 100 + s);
    EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))).norm(), 1e-12);
    const Qhmm c = conjugate_by_unitary(m, u);
    EXPECT_TRUE(validate_quantum(c).valid());
    for (std::size_t l = 1; l <= 5; ++l) {
      for (const auto& w : oracle::all_words(2, l)) {
        ASSERT_NEAR(oracle::kraus_trace(m, w).real(), oracle::kraus_trace(c, w).real(), 1e-12);
      }
    }
  }
}

TEST(Conjugation, RejectsNonUnitary) {
  const Qhmm m = random_qhmm(2, 2, 1, 1);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(2, 2);
  u(0, 1) = 0.1;
  EXPECT_THROW(conjugate_by_unitary(m, u), DomainError);
  EXPECT_THROW(conjugate_by_unitary(m, Eigen::MatrixXcd::Identity(3, 3)), Error);
}

TEST(Alphabet, WordsRoundTrip) {
  const Alphabet bin = Alphabet::numeric(2);
  EXPECT_EQ(parse_word(bin, "0110"), (Word{0, 1, 1, 0}));
  EXPECT_EQ(format_word(bin, {1, 0}), "10");
  EXPECT_THROW(parse_word(bin, "012"), DomainError);
  const Alphabet named({"up", "down"});
  EXPECT_EQ(parse_word(named, "up,down,down"), (Word{0, 1, 1}));
  EXPECT_EQ(format_word(named, {1, 0}), "down,up");
  EXPECT_EQ(parse_word(named, ""), Word{});
}
