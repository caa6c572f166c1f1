#include <cstdlib>
#include <string_view>

#include "viaduct/simd/bitops.hpp"

namespace viaduct::simd {

#if defined(VIADUCT_HAVE_AVX2)
const BitKernels* avx2_kernels_impl();
#endif

const BitKernels* avx2_kernels() {
#if defined(VIADUCT_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") != 0;
  return supported ? avx2_kernels_impl() : nullptr;
#else
  return nullptr;
#endif
}

const BitKernels& active() {
  static const BitKernels& chosen = []() -> const BitKernels& {
    const char* env = std::getenv("VIADUCT_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const BitKernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace viaduct::simd
