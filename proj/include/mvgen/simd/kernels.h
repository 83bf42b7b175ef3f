#pragma once

/// @file kernels.h
/// @brief Data-parallel float kernels used by the analysis stages.
///
/// Every kernel has a scalar reference implementation; vector variants
/// (AVX2+FMA on x86-64, NEON on AArch64) are selected at runtime. Reductions
/// may differ from the scalar reference by float reassociation only.
/// Setting MVGEN_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mvgen::simd {

struct KernelTable {
  std::string_view name;

  /// sum a[i] * b[i]
  float (*dot)(const float* a, const float* b, std::size_t n);
  /// sum a[i]^2
  float (*sum_squares)(const float* a, std::size_t n);
  /// sum max(0, cur[i] - prev[i])^2
  float (*rectified_diff_energy)(const float* cur, const float* prev, std::size_t n);
  /// out[i] = in[i] * window[i]
  void (*apply_window)(const float* in, const float* window, float* out, std::size_t n);
  /// out[i] = scale * |(re, im)| for interleaved complex input of n bins
  void (*magnitudes)(const float* interleaved, float scale, float* out, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Kernel tables compiled in and supported by the running CPU, scalar first.
std::vector<const KernelTable*> available_kernels();

/// The table used by the library; chosen once per process.
const KernelTable& active_kernels();

inline float dot(std::span<const float> a, std::span<const float> b) {
  return active_kernels().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline float sum_squares(std::span<const float> a) {
  return active_kernels().sum_squares(a.data(), a.size());
}

}  // namespace mvgen::simd
