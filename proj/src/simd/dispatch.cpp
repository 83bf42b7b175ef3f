#include <cstdlib>
#include <string_view>

#include "kernels_impl.h"

namespace mvgen::simd {

namespace {

bool cpu_has_avx2() {
#if defined(MVGEN_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select_kernels() {
  const char* forced = std::getenv("MVGEN_SIMD");
  auto tables = available_kernels();
  if (forced != nullptr) {
    for (const KernelTable* t : tables) {
      if (t->name == forced) return *t;
    }
    return scalar_kernels();
  }
  return *tables.back();
}

}  // namespace

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> tables{&scalar_kernels()};
#if defined(MVGEN_HAVE_AVX2)
  if (cpu_has_avx2()) tables.push_back(&avx2_kernels());
#endif
#if defined(MVGEN_HAVE_NEON)
  tables.push_back(&neon_kernels());
#endif
  return tables;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select_kernels();
  return table;
}

}  // namespace mvgen::simd
