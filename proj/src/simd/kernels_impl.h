#pragma once

// Internal: per-ISA kernel tables. Only declared for the ISAs compiled in.

#include "mvgen/simd/kernels.h"

namespace mvgen::simd {

#if defined(MVGEN_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

#if defined(MVGEN_HAVE_NEON)
const KernelTable& neon_kernels();
#endif

}  // namespace mvgen::simd
