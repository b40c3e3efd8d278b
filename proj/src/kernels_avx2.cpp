// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check (see kernels.cpp).

#include <immintrin.h>

#include "kernels_impl.hpp"

#if !defined(__AVX2__) || !defined(__FMA__)
#error "kernels_avx2.cpp requires -mavx2 -mfma"
#endif

namespace sift::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// y[0..n) += x[0..n) * s
inline void axpy(std::size_t n, double s, const double* x, double* y) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), vs, y0);
    y1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), vs, y1);
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(_mm256_loadu_pd(x + i), vs, _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += x[i] * s;
}

// In-register transpose of a 4x4 block held as four columns.
inline void transpose4(__m256d& c0, __m256d& c1, __m256d& c2, __m256d& c3) {
  const __m256d t0 = _mm256_unpacklo_pd(c0, c1);  // c0[0] c1[0] c0[2] c1[2]
  const __m256d t1 = _mm256_unpackhi_pd(c0, c1);  // c0[1] c1[1] c0[3] c1[3]
  const __m256d t2 = _mm256_unpacklo_pd(c2, c3);
  const __m256d t3 = _mm256_unpackhi_pd(c2, c3);
  c0 = _mm256_permute2f128_pd(t0, t2, 0x20);
  c1 = _mm256_permute2f128_pd(t1, t3, 0x20);
  c2 = _mm256_permute2f128_pd(t0, t2, 0x31);
  c3 = _mm256_permute2f128_pd(t1, t3, 0x31);
}

}  // namespace

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void gemm_nn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * m;
    for (std::size_t i = 0; i < m; ++i) cj[i] = 0.0;
    for (std::size_t l = 0; l < k; ++l) axpy(m, b[l + j * k], a + l * m, cj);
  }
}

void gemm_tn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c) {
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) c[i + j * m] = dot_avx2(k, a + i * k, b + j * k);
}

void rank_update_avx2(std::size_t n, std::size_t q, double alpha, const double* a,
                      const double* b, double* c) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * n;
    for (std::size_t t = 0; t < q; ++t) axpy(n, alpha * b[j + t * n], a + t * n, cj);
  }
}

void symmetrize_avx2(std::size_t n, double* a) {
  const __m256d half = _mm256_set1_pd(0.5);
  const std::size_t nb = n - n % 4;
  auto col = [&](std::size_t i, std::size_t j) { return a + i + j * n; };

  for (std::size_t jb = 0; jb < nb; jb += 4) {
    // Diagonal block: average with its own transpose.
    {
      __m256d d0 = _mm256_loadu_pd(col(jb, jb));
      __m256d d1 = _mm256_loadu_pd(col(jb, jb + 1));
      __m256d d2 = _mm256_loadu_pd(col(jb, jb + 2));
      __m256d d3 = _mm256_loadu_pd(col(jb, jb + 3));
      __m256d t0 = d0, t1 = d1, t2 = d2, t3 = d3;
      transpose4(t0, t1, t2, t3);
      _mm256_storeu_pd(col(jb, jb), _mm256_mul_pd(half, _mm256_add_pd(d0, t0)));
      _mm256_storeu_pd(col(jb, jb + 1), _mm256_mul_pd(half, _mm256_add_pd(d1, t1)));
      _mm256_storeu_pd(col(jb, jb + 2), _mm256_mul_pd(half, _mm256_add_pd(d2, t2)));
      _mm256_storeu_pd(col(jb, jb + 3), _mm256_mul_pd(half, _mm256_add_pd(d3, t3)));
    }
    // Upper off-diagonal blocks (ib < jb) paired with their mirror (jb, ib).
    for (std::size_t ib = 0; ib < jb; ib += 4) {
      __m256d u0 = _mm256_loadu_pd(col(ib, jb));
      __m256d u1 = _mm256_loadu_pd(col(ib, jb + 1));
      __m256d u2 = _mm256_loadu_pd(col(ib, jb + 2));
      __m256d u3 = _mm256_loadu_pd(col(ib, jb + 3));
      __m256d l0 = _mm256_loadu_pd(col(jb, ib));
      __m256d l1 = _mm256_loadu_pd(col(jb, ib + 1));
      __m256d l2 = _mm256_loadu_pd(col(jb, ib + 2));
      __m256d l3 = _mm256_loadu_pd(col(jb, ib + 3));
      transpose4(l0, l1, l2, l3);
      u0 = _mm256_mul_pd(half, _mm256_add_pd(u0, l0));
      u1 = _mm256_mul_pd(half, _mm256_add_pd(u1, l1));
      u2 = _mm256_mul_pd(half, _mm256_add_pd(u2, l2));
      u3 = _mm256_mul_pd(half, _mm256_add_pd(u3, l3));
      _mm256_storeu_pd(col(ib, jb), u0);
      _mm256_storeu_pd(col(ib, jb + 1), u1);
      _mm256_storeu_pd(col(ib, jb + 2), u2);
      _mm256_storeu_pd(col(ib, jb + 3), u3);
      transpose4(u0, u1, u2, u3);
      _mm256_storeu_pd(col(jb, ib), u0);
      _mm256_storeu_pd(col(jb, ib + 1), u1);
      _mm256_storeu_pd(col(jb, ib + 2), u2);
      _mm256_storeu_pd(col(jb, ib + 3), u3);
    }
  }
  // Ragged edge: columns past the last full block.
  for (std::size_t j = nb; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (a[i + j * n] + a[j + i * n]);
      a[i + j * n] = v;
      a[j + i * n] = v;
    }
  }
}

}  // namespace sift::kernels::detail
