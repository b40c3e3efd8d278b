#include <gtest/gtest.h>

#include <cstring>

#include "sift/kernels.hpp"
#include "test_util.hpp"

using namespace sift;
using sift::testing::gaussian;
using sift::testing::Rng;

namespace {

const kernels::KernelTable* avx2_or_skip() { return kernels::avx2_kernels(); }

double max_rel(const Matrix& a, const Matrix& b) { return sift::testing::rel_diff(a, b); }

}  // namespace

TEST(Kernels, ScalarGemmMatchesEigen) {
  Rng rng(1);
  const auto& k = kernels::scalar_kernels();
  for (int m : {1, 3, 7})
    for (int n : {1, 4, 9}) {
      const Matrix a = gaussian(rng, m, 5), b = gaussian(rng, 5, n);
      Matrix c(m, n);
      k.gemm_nn(m, n, 5, a.data(), b.data(), c.data());
      EXPECT_LT(max_rel(c, a * b), 1e-14);
      const Matrix at = gaussian(rng, 5, m);
      k.gemm_tn(m, n, 5, at.data(), b.data(), c.data());
      EXPECT_LT(max_rel(c, at.transpose() * b), 1e-14);
    }
}

TEST(Kernels, ScalarRankUpdateAndDot) {
  Rng rng(2);
  const auto& k = kernels::scalar_kernels();
  const Matrix a = gaussian(rng, 6, 2), b = gaussian(rng, 6, 2);
  Matrix c = gaussian(rng, 6, 6);
  const Matrix expected = c - 0.5 * a * b.transpose();
  k.rank_update(6, 2, -0.5, a.data(), b.data(), c.data());
  EXPECT_LT(max_rel(c, expected), 1e-14);
  const Vector x = gaussian(rng, 11, 1), y = gaussian(rng, 11, 1);
  EXPECT_NEAR(k.dot(11, x.data(), y.data()), x.dot(y), 1e-13);
}

TEST(Kernels, Avx2MatchesScalarAcrossShapes) {
  const auto* fast = avx2_or_skip();
  if (fast == nullptr) GTEST_SKIP() << "AVX2/FMA not available";
  const auto& ref = kernels::scalar_kernels();
  Rng rng(3);
  // Sizes straddle the 4-wide vector length and its tails.
  for (int m = 1; m <= 13; m += 3)
    for (int n = 1; n <= 10; n += 3)
      for (int kk : {1, 2, 5, 8}) {
        const Matrix a = gaussian(rng, m, kk), b = gaussian(rng, kk, n), at = gaussian(rng, kk, m);
        Matrix c1(m, n), c2(m, n);
        ref.gemm_nn(m, n, kk, a.data(), b.data(), c1.data());
        fast->gemm_nn(m, n, kk, a.data(), b.data(), c2.data());
        EXPECT_LT(max_rel(c1, c2), 1e-13) << m << "x" << n << "x" << kk;
        ref.gemm_tn(m, n, kk, at.data(), b.data(), c1.data());
        fast->gemm_tn(m, n, kk, at.data(), b.data(), c2.data());
        EXPECT_LT(max_rel(c1, c2), 1e-13) << m << "x" << n << "x" << kk;
      }
  for (int n = 1; n <= 17; ++n) {
    const Matrix a = gaussian(rng, n, 3), b = gaussian(rng, n, 3);
    Matrix c1 = gaussian(rng, n, n), c2 = c1;
    ref.rank_update(n, 3, 0.7, a.data(), b.data(), c1.data());
    fast->rank_update(n, 3, 0.7, a.data(), b.data(), c2.data());
    EXPECT_LT(max_rel(c1, c2), 1e-13) << n;
    const Vector x = gaussian(rng, n, 1), y = gaussian(rng, n, 1);
    EXPECT_NEAR(ref.dot(n, x.data(), y.data()), fast->dot(n, x.data(), y.data()), 1e-12 * (1 + x.norm() * y.norm()));
  }
}

TEST(Kernels, Avx2SymmetrizeIsBitwiseIdentical) {
  const auto* fast = avx2_or_skip();
  if (fast == nullptr) GTEST_SKIP() << "AVX2/FMA not available";
  Rng rng(4);
  for (int n = 1; n <= 19; ++n) {
    Matrix a = gaussian(rng, n, n), b = a;
    kernels::scalar_kernels().symmetrize(n, a.data());
    fast->symmetrize(n, b.data());
    EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * n * n)) << n;
    EXPECT_TRUE(a == a.transpose());
  }
}

TEST(Kernels, SelectionSwitchesActiveTable) {
  const auto& before = kernels::active_kernels();
  ASSERT_TRUE(kernels::select_kernels("scalar"));
  EXPECT_EQ(kernels::active_kernels().name, "scalar");
  EXPECT_FALSE(kernels::select_kernels("neon"));
  EXPECT_EQ(kernels::active_kernels().name, "scalar");
  if (kernels::avx2_kernels() != nullptr) {
    ASSERT_TRUE(kernels::select_kernels("avx2"));
    EXPECT_EQ(kernels::active_kernels().name, "avx2");
  }
  kernels::select_kernels(before.name);
}
