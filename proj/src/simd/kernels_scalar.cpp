#include <cmath>

#include "mvgen/simd/kernels.h"

namespace mvgen::simd {

namespace {

float dot_scalar(const float* a, const float* b, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

float sum_squares_scalar(const float* a, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

float rectified_diff_energy_scalar(const float* cur, const float* prev, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) {
    float d = cur[i] - prev[i];
    if (d > 0.0f) acc += d * d;
  }
  return acc;
}

void apply_window_scalar(const float* in, const float* window, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] * window[i];
}

void magnitudes_scalar(const float* interleaved, float scale, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    float re = interleaved[2 * i];
    float im = interleaved[2 * i + 1];
    out[i] = scale * std::sqrt(re * re + im * im);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",          dot_scalar,          sum_squares_scalar,
                                 rectified_diff_energy_scalar, apply_window_scalar, magnitudes_scalar};
  return table;
}

}  // namespace mvgen::simd
