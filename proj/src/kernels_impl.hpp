#pragma once

#include <cstddef>

namespace sift::kernels::detail {

double dot_scalar(std::size_t n, const double* x, const double* y);
void gemm_nn_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a,
                    const double* b, double* c);
void gemm_tn_scalar(std::size_t m, std::size_t n, std::size_t k, const double* a,
                    const double* b, double* c);
void rank_update_scalar(std::size_t n, std::size_t q, double alpha, const double* a,
                        const double* b, double* c);
void symmetrize_scalar(std::size_t n, double* a);

#if defined(SIFT_HAVE_AVX2)
double dot_avx2(std::size_t n, const double* x, const double* y);
void gemm_nn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);
void gemm_tn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c);
void rank_update_avx2(std::size_t n, std::size_t q, double alpha, const double* a,
                      const double* b, double* c);
void symmetrize_avx2(std::size_t n, double* a);
#endif

}  // namespace sift::kernels::detail
