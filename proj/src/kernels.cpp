#include "sift/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace sift::kernels {
namespace {

constexpr KernelTable kScalar{
    "scalar",
    &detail::dot_scalar,
    &detail::gemm_nn_scalar,
    &detail::gemm_tn_scalar,
    &detail::rank_update_scalar,
    &detail::symmetrize_scalar,
};

#if defined(SIFT_HAVE_AVX2)
constexpr KernelTable kAvx2{
    "avx2",
    &detail::dot_avx2,
    &detail::gemm_nn_avx2,
    &detail::gemm_tn_avx2,
    &detail::rank_update_avx2,
    &detail::symmetrize_avx2,
};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* initial_table() {
  const KernelTable* best = avx2_kernels();
  if (const char* env = std::getenv("SIFT_RLS_KERNELS")) {
    if (std::string_view(env) == "scalar") return &kScalar;
  }
  return best ? best : &kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
#if defined(SIFT_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

bool select_kernels(std::string_view name) {
  const KernelTable* table = nullptr;
  if (name == "scalar") table = &kScalar;
  else if (name == "avx2") table = avx2_kernels();
  if (!table) return false;
  active_slot().store(table, std::memory_order_release);
  return true;
}

}  // namespace sift::kernels
