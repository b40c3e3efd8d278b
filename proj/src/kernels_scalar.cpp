#include "kernels_impl.hpp"

namespace sift::kernels::detail {

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void gemm_nn_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a,
                    const double* b, double* c) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * m;
    for (std::size_t i = 0; i < m; ++i) cj[i] = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      const double blj = b[l + j * k];
      const double* al = a + l * m;
      for (std::size_t i = 0; i < m; ++i) cj[i] += al[i] * blj;
    }
  }
}

void gemm_tn_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a,
                    const double* b, double* c) {
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) c[i + j * m] = dot_scalar(k, a + i * k, b + j * k);
}

void rank_update_scalar(std::size_t n, std::size_t q, double alpha, const double* a,
                        const double* b, double* c) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * n;
    for (std::size_t t = 0; t < q; ++t) {
      const double s = alpha * b[j + t * n];
      const double* at = a + t * n;
      for (std::size_t i = 0; i < n; ++i) cj[i] += at[i] * s;
    }
  }
}

void symmetrize_scalar(std::size_t n, double* a) {
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double v = 0.5 * (a[i + j * n] + a[j + i * n]);
      a[i + j * n] = v;
      a[j + i * n] = v;
    }
  }
}

}  // namespace sift::kernels::detail
