#include <gtest/gtest.h>

#include <limits>

#include "sift/error.hpp"
#include "sift/numerics.hpp"
#include "test_util.hpp"

using namespace sift;
using sift::testing::gaussian;
using sift::testing::rel_diff;
using sift::testing::Rng;

TEST(SymMatrix, ConstructionSymmetrizesAndValidates) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  const SymMatrix s(a);
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s(1, 0), 1.0);
  EXPECT_THROW(SymMatrix(Matrix(2, 3)), ShapeError);
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(SymMatrix{a}, DomainError);
}

TEST(Symmetrize, FixedPointAndExactSymmetry) {
  Rng rng(10);
  const Matrix r = gaussian(rng, 4, 4);
  const SymMatrix s = symmetrize(r);
  EXPECT_TRUE(s.matrix() == s.matrix().transpose());
  EXPECT_TRUE(symmetrize(s.matrix()).matrix() == s.matrix());
  EXPECT_THROW(symmetrize(Matrix(3, 2)), ShapeError);
}

TEST(CompactSvd, DiagonalAndZero) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.1;
  const auto svd = compact_svd(d, true);
  EXPECT_NEAR(svd.sigma(0), 2.0, 1e-15);
  EXPECT_NEAR(svd.sigma(1), 0.1, 1e-15);
  EXPECT_NEAR(std::abs(svd.u(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(svd.v->coeff(1, 1)), 1.0, 1e-15);

  const auto z = compact_svd(Matrix::Zero(2, 4));
  ASSERT_EQ(z.sigma.size(), 2);
  EXPECT_EQ(z.sigma(0), 0.0);
  EXPECT_FALSE(z.v.has_value());
}

TEST(CompactSvd, ReconstructionAndOrderingOnRandomMatrices) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const Index r = 1 + t % 5, c = 1 + (t / 5) % 6;
    const Matrix m = gaussian(rng, r, c);
    const auto svd = compact_svd(m, true);
    ASSERT_EQ(svd.sigma.size(), std::min(r, c));
    for (Index i = 1; i < svd.sigma.size(); ++i) EXPECT_GE(svd.sigma(i - 1), svd.sigma(i));
    const Matrix recon = svd.u * svd.sigma.asDiagonal() * svd.v->transpose();
    EXPECT_LE((m - recon).norm(), kTolSvd * std::max(1.0, m.norm()));
    const Matrix utu = svd.u.transpose() * svd.u;
    EXPECT_LE((utu - Matrix::Identity(utu.rows(), utu.cols())).cwiseAbs().maxCoeff(), kTolOrth);
  }
}

TEST(SymEigvals, KnownSpectra) {
  EXPECT_TRUE(sym_eigvals(SymMatrix::identity(3)).isApprox(Vector::Ones(3)));
  const Vector d = sym_eigvals(SymMatrix::diagonal(Eigen::Vector3d(3, 1, 2)));
  EXPECT_DOUBLE_EQ(d(0), 1);
  EXPECT_DOUBLE_EQ(d(1), 2);
  EXPECT_DOUBLE_EQ(d(2), 3);
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const Vector e = sym_eigvals(SymMatrix(a));
  EXPECT_NEAR(e(0), 1.0, 1e-14);
  EXPECT_NEAR(e(1), 3.0, 1e-14);
  EXPECT_NEAR(spectral_radius(SymMatrix(a)), 3.0, 1e-14);
  EXPECT_DOUBLE_EQ(spectral_radius(SymMatrix::diagonal(Eigen::Vector2d(-3, 2))), 3.0);
  EXPECT_DOUBLE_EQ(spectral_radius(SymMatrix::identity(4)), 1.0);
}

TEST(SymEigvals, NeverNanForFiniteInput) {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    Matrix m = gaussian(rng, 5, 5, std::pow(10.0, t % 7 - 3));
    EXPECT_TRUE(sym_eigvals(symmetrize(m)).allFinite());
  }
}

TEST(ConditionNumber, RatiosAndSingularSentinel) {
  EXPECT_DOUBLE_EQ(condition_number(SymMatrix::diagonal(Eigen::Vector2d(4, 1))), 4.0);
  EXPECT_EQ(condition_number(SymMatrix::diagonal(Eigen::Vector2d(1, 0))), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(condition_number(SymMatrix::diagonal(Eigen::Vector2d(2e-4, 1))), 5000.0, 1e-9);
  EXPECT_THROW(condition_number(SymMatrix::diagonal(Eigen::Vector2d(1, -0.5))), DomainError);
}

TEST(InverseSpd, InvertsAndRejectsIndefinite) {
  Rng rng(13);
  const SymMatrix a(sift::testing::random_spd(rng, 5));
  const SymMatrix inv = inverse_spd(a);
  EXPECT_LT((a.matrix() * inv.matrix() - Matrix::Identity(5, 5)).norm(), 1e-12);
  EXPECT_THROW(inverse_spd(SymMatrix::diagonal(Eigen::Vector2d(1, -1))), NumericalFailure);
}

TEST(MilUpdate, ScalarExamples) {
  const SymMatrix p = SymMatrix::identity(1);
  const Matrix phi = Matrix::Ones(1, 1);
  const Matrix l = phi;  // phi * R with R = 1
  const SymMatrix p_bar = mil_rank_q_update(p, phi, MilMode::Sifting, 0.5, &l);
  EXPECT_NEAR(p_bar(0, 0), 2.0, 1e-15);
  const SymMatrix p_next = mil_rank_q_update(p_bar, phi, MilMode::Measurement);
  EXPECT_NEAR(p_next(0, 0), 2.0 / 3.0, 1e-15);
}

TEST(MilUpdate, ErrorsOnMissingProductAndShapes) {
  const SymMatrix p = SymMatrix::identity(2);
  const Matrix phi = Matrix::Ones(1, 2);
  EXPECT_THROW(mil_rank_q_update(p, phi, MilMode::Sifting, 0.5), std::invalid_argument);
  const Matrix wrong = Matrix::Ones(1, 3);
  EXPECT_THROW(mil_rank_q_update(p, wrong, MilMode::Measurement), ShapeError);
  const Matrix l = Matrix::Ones(2, 2);
  EXPECT_THROW(mil_rank_q_update(p, phi, MilMode::Sifting, 0.5, &l), ShapeError);
  // Rank-deficient phi makes the inner system singular.
  const Matrix dup = Matrix::Ones(2, 2);
  const Matrix ldup = dup;
  EXPECT_THROW(mil_rank_q_update(p, dup, MilMode::Sifting, 0.5, &ldup), NumericalFailure);
}

// Oracle: form R = P^{-1}, apply the information-space update, invert.
TEST(MilUpdate, MatchesInformationSpaceOracle) {
  Rng rng(14);
  const double lambda = 0.6;
  for (int t = 0; t < 200; ++t) {
    const Index n = 1 + t % 8;
    const Index q = 1 + (t / 8) % n;
    const Matrix r = sift::testing::random_spd(rng, n);
    const Matrix p = r.inverse();
    const Matrix phi = sift::testing::conditioned(rng, q, n, 0.3, 2.0);
    const Matrix l = phi * r;

    const SymMatrix p_bar = mil_rank_q_update(SymMatrix(p), phi, MilMode::Sifting, lambda, &l);
    const Matrix r_bar = r - (1 - lambda) * l.transpose() * (l * phi.transpose()).inverse() * l;
    EXPECT_LT(rel_diff(p_bar.matrix(), r_bar.inverse()), 1e-8) << n << " " << q;

    const SymMatrix p_next = mil_rank_q_update(p_bar, phi, MilMode::Measurement);
    const Matrix r_next = r_bar + phi.transpose() * phi;
    EXPECT_LT(rel_diff(p_next.matrix(), r_next.inverse()), 1e-8) << n << " " << q;
  }
}

TEST(KernelProducts, ShapeChecks) {
  EXPECT_THROW(multiply(Matrix(2, 3), Matrix(2, 3)), ShapeError);
  EXPECT_THROW(multiply_tn(Matrix(2, 3), Matrix(3, 3)), ShapeError);
  Matrix c = Matrix::Zero(2, 2);
  EXPECT_THROW(add_rank_update(c, 1.0, Matrix(3, 1), Matrix(3, 1)), ShapeError);
  EXPECT_EQ(multiply(Matrix(2, 0), Matrix(0, 3)), Matrix::Zero(2, 3));
}
