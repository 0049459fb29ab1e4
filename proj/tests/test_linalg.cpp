#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "seigen/datagen.hpp"
#include "seigen/errors.hpp"
#include "seigen/linalg.hpp"
#include "support.hpp"

using namespace seigen;
using testsupport::cosine;

namespace {

DenseMatrix random_symmetric(std::size_t n, RandomSource& rng) {
  const DenseMatrix g = testsupport::gaussian(n, n, rng);
  DenseMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = g(i, j) + g(j, i);
  return s;
}

// Q diag(values) Q^T with a random orthogonal Q.
DenseMatrix with_spectrum(const std::vector<double>& values, RandomSource& rng) {
  const std::size_t n = values.size();
  const DenseMatrix q = random_orthogonal(n, rng);
  DenseMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < n; ++l) acc += q(i, l) * values[l] * q(j, l);
      s(i, j) = acc;
    }
  return s;
}

RealVector ones(std::size_t n) { return RealVector(n, 1.0); }

}  // namespace

TEST(Linalg, MatrixBasics) {
  const DenseMatrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.transpose()(2, 1), 6);
  EXPECT_EQ(multiply(m, DenseMatrix::identity(3)), m);
  EXPECT_EQ(matvec(m, RealVector{1, 0, -1}), (RealVector{-2, -2}));
  EXPECT_EQ(matvec_transpose(m, RealVector{1, 1}), (RealVector{5, 7, 9}));
  EXPECT_DOUBLE_EQ(m.frobenius_norm(), std::sqrt(91.0));
  EXPECT_THROW(multiply(m, m), DimensionError);
}

TEST(Linalg, NormalizeRejectsZero) {
  EXPECT_THROW(normalize(RealVector{0, 0}), DegenerateError);
}

TEST(Linalg, JacobiMatchesIndependentSolver) {
  RandomSource rng(1);
  for (std::size_t n : {1u, 2u, 7u, 30u}) {
    const DenseMatrix s = random_symmetric(n, rng);
    const auto mine = jacobi_eigen_oracle(s);
    const auto ref = testsupport::eigen_pairs(s);
    ASSERT_EQ(mine.size(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(mine[i].value, ref[i].value, 1e-10 * std::max(1.0, std::fabs(ref[0].value)));
      EXPECT_GE(cosine(mine[i].vector, ref[i].vector), 1 - 1e-9);
    }
  }
}

TEST(Linalg, JacobiRejectsAsymmetric) {
  EXPECT_THROW(jacobi_eigen_oracle(DenseMatrix{{1, 2}, {0, 1}}), DomainError);
}

TEST(Linalg, JacobiCanonicalSign) {
  RandomSource rng(2);
  for (const auto& p : jacobi_eigen_oracle(random_symmetric(6, rng))) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < p.vector.size(); ++i)
      if (std::fabs(p.vector[i]) > std::fabs(p.vector[arg])) arg = i;
    EXPECT_GT(p.vector[arg], 0.0);
  }
}

TEST(Linalg, PowerIterationReferenceFindsPrincipalPair) {
  RandomSource rng(3);
  const DenseMatrix s = with_spectrum({10, 5, 2, 1, 0.5}, rng);
  const auto out = power_iteration_reference(s, ones(5), 1e-10, 1000);
  EXPECT_NEAR(out.pair.value, 10.0, 1e-8);
  EXPECT_GE(cosine(out.pair.vector, testsupport::principal_vector(s)), 1 - 1e-12);
}

TEST(Linalg, PowerIterationRoundsShrinkWithGap) {
  RandomSource rng(4);
  int previous = 1 << 30;
  for (double g : {0.9, 0.5, 0.1}) {
    const DenseMatrix s = with_spectrum({1.0, g, g * 0.5, g * 0.25}, rng);
    const int rounds = power_iteration_reference(s, ones(4), 1e-10, 10000).rounds;
    EXPECT_LT(rounds, previous) << "gap " << g;
    previous = rounds;
  }
}

TEST(Linalg, PowerIterationRepeatedTopEigenvalueReportsNonConvergence) {
  RandomSource rng(5);
  const DenseMatrix s = with_spectrum({3, 3, 1, 0.5}, rng);
  EXPECT_THROW(power_iteration_reference(s, ones(4), 1e-10, 1000), NonConvergenceError);
}

TEST(Linalg, PowerIterationBudgetExhausted) {
  RandomSource rng(6);
  const DenseMatrix s = with_spectrum({1.0, 0.99, 0.5}, rng);
  try {
    power_iteration_reference(s, ones(3), 1e-12, 3);
    FAIL();
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().size(), 3u);
  }
}

TEST(Linalg, CorrelationBlocksEqualGramOfConcatenation) {
  RandomSource rng(7);
  const DenseMatrix a = testsupport::gaussian(6, 3, rng);
  const DenseMatrix b = testsupport::gaussian(6, 4, rng);
  const std::vector<DenseMatrix> parts{a, b};
  const DenseMatrix blocks = correlation_blocks(a, b);
  const DenseMatrix ref = testsupport::combined_gram(parts);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) EXPECT_NEAR(blocks(i, j), ref(i, j), 1e-12);
  EXPECT_THROW(correlation_blocks(a, testsupport::gaussian(5, 2, rng)), DimensionError);
}

TEST(Linalg, TransposeMappingGivesOuterEigenvector) {
  RandomSource rng(8);
  const DenseMatrix m = testsupport::gaussian(5, 8, rng);
  const auto top = jacobi_eigen_oracle(gram(m)).front();
  const EigenPair mapped = map_eigenvector_transpose(m, top);
  const auto ref = testsupport::eigen_pairs(outer_gram(m)).front();
  EXPECT_NEAR(mapped.value, ref.value, 1e-9 * ref.value);
  EXPECT_GE(cosine(mapped.vector, ref.vector), 1 - 1e-12);
}

TEST(Linalg, TransposeMappingRejectsNullDirection) {
  const DenseMatrix m{{1, 1}, {1, 1}};
  EXPECT_THROW(map_eigenvector_transpose(m, EigenPair{0.0, normalize(RealVector{1, -1})}), Error);
}

TEST(Linalg, PaddingShiftsSpectrumByRSquared) {
  RandomSource rng(9);
  const DenseMatrix m = testsupport::gaussian(4, 6, rng);
  const double r = 2.5;
  const DenseMatrix padded = pad_matrix(m, r);
  EXPECT_EQ(padded.cols(), 10u);
  EXPECT_DOUBLE_EQ(padded(1, 7), r);
  const auto ref = testsupport::eigen_pairs(outer_gram(m));
  const auto shifted = testsupport::eigen_pairs(outer_gram(padded));
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(shifted[i].value, ref[i].value + r * r, 1e-9);
}

TEST(Linalg, LeftNullSpace) {
  RandomSource rng(10);
  const DenseMatrix a = random_low_rank(8, 6, 3, rng);
  const auto null = left_null_space(a, default_null_tolerance(a));
  ASSERT_EQ(null.size(), 5u);
  for (const auto& n : null) EXPECT_LT(norm2(matvec_transpose(a, n)), 1e-9 * a.frobenius_norm());
  EXPECT_TRUE(left_null_space(pad_matrix(a, 2.0), default_null_tolerance(pad_matrix(a, 2.0))).empty());
  EXPECT_TRUE(left_null_space(testsupport::gaussian(4, 6, rng), 1e-9).empty());
  EXPECT_EQ(column_space(a, default_null_tolerance(a)).size(), 3u);
}

TEST(Linalg, NullToleranceScalesWithData) {
  RandomSource rng(11);
  const DenseMatrix a = random_low_rank(8, 6, 3, rng);
  DenseMatrix big(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) big(r, c) = a(r, c) * 1e4;
  EXPECT_EQ(left_null_space(big, default_null_tolerance(big)).size(), 5u);
}

TEST(Linalg, Orthonormalize) {
  const std::vector<RealVector> v{{1, 1, 0}, {2, 2, 0}, {0, 1, 1}};
  const auto q = orthonormalize(v, 1e-10);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_NEAR(dot(q[0], q[1]), 0.0, 1e-15);
  EXPECT_NEAR(norm2(q[1]), 1.0, 1e-15);
}

TEST(Linalg, PrincipalAnglesKnownCases) {
  const std::vector<RealVector> x{{1, 0, 0}};
  const std::vector<RealVector> y{{0, 1, 0}};
  const double t = 0.3;
  const std::vector<RealVector> z{{std::cos(t), std::sin(t), 0}};
  EXPECT_NEAR(principal_angles(x, x).front(), 0.0, 1e-15);
  EXPECT_NEAR(principal_angles(x, y).front(), std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(principal_angles(x, z).front(), t, 1e-15);
  EXPECT_NEAR(principal_angles(x, std::vector<RealVector>{{std::cos(1e-9), std::sin(1e-9), 0}}).front(),
              1e-9, 1e-20);
  EXPECT_THROW(principal_angles(std::vector<RealVector>{{2, 0, 0}}, x), DomainError);
}

TEST(Linalg, PrincipalAnglesMatchReference) {
  RandomSource rng(12);
  const auto u = orthonormalize(std::vector<RealVector>{testsupport::gaussian(9, 3, rng).column(0),
                                                        testsupport::gaussian(9, 3, rng).column(1)},
                                1e-12);
  const auto v = testsupport::column_basis(testsupport::gaussian(9, 4, rng));
  EXPECT_NEAR(principal_angles(u, v).back(), testsupport::max_angle(u, v), 1e-12);
}

TEST(Linalg, DominantSubspaceRecoversSpan) {
  RandomSource rng(13);
  const DenseMatrix basis = testsupport::gaussian(10, 2, rng);
  std::vector<RealVector> samples;
  for (int i = 0; i < 6; ++i) samples.push_back(matvec(basis, RealVector{rng.normal(1), rng.normal(1)}));
  const auto est = dominant_subspace(samples, 2);
  EXPECT_LT(testsupport::max_angle(est, testsupport::column_basis(basis)), 1e-10);
}

TEST(Linalg, Deflate) {
  const RealVector v = normalize(RealVector{1, 2, 2});
  const RealVector w = deflate(RealVector{3, -1, 4}, v);
  EXPECT_NEAR(dot(w, v), 0.0, 1e-15);
  EXPECT_THROW(deflate(RealVector{1, 0, 0}, RealVector{1, 2, 2}), DomainError);
  EXPECT_LT(norm2(deflate(v, v)), 1e-16);
}

TEST(Linalg, MatrixTextRoundTripIsExact) {
  RandomSource rng(14);
  const DenseMatrix m = testsupport::gaussian(3, 4, rng);
  std::stringstream ss;
  write_matrix(ss, m);
  EXPECT_EQ(read_matrix(ss), m);
  std::stringstream bad("2 2\n1 2\n3\n");
  EXPECT_THROW(read_matrix(bad), Error);
}
