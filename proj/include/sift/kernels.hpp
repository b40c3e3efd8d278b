#pragma once

// Dense double-precision inner loops used by the covariance and information
// updates. Every kernel has a portable scalar reference implementation; an
// AVX2/FMA variant is compiled when the toolchain allows it and selected at
// runtime when the CPU supports it.
//
// All matrices are column-major and densely packed (leading dimension equals
// the row count), which is the Eigen default storage.

#include <cstddef>
#include <string_view>

namespace sift::kernels {

struct KernelTable {
  std::string_view name;

  /// x . y
  double (*dot)(std::size_t n, const double* x, const double* y);

  /// C(m x n) = A(m x k) * B(k x n)
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);

  /// C(m x n) = A(k x m)^T * B(k x n)
  void (*gemm_tn)(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);

  /// C(n x n) += alpha * A(n x q) * B(n x q)^T
  void (*rank_update)(std::size_t n, std::size_t q, double alpha, const double* a,
                      const double* b, double* c);

  /// A <- (A + A^T) / 2, in place. Mirrored entries are written from the same
  /// computed value, so the result is exactly symmetric.
  void (*symmetrize)(std::size_t n, double* a);
};

const KernelTable& scalar_kernels();

/// The AVX2/FMA table, or nullptr if it was not built or the running CPU
/// lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Table used by the library. Chosen once on first use: AVX2 when available,
/// scalar otherwise. The environment variable SIFT_RLS_KERNELS=scalar forces
/// the reference path.
const KernelTable& active_kernels();

/// Override the active table ("scalar" or "avx2"). Returns false if the
/// requested variant is unavailable; the active table is then left unchanged.
bool select_kernels(std::string_view name);

}  // namespace sift::kernels
