#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.h"

namespace mvgen::simd {

namespace {

float dot_neon(const float* a, const float* b, std::size_t n) {
  float32x4_t acc0 = vdupq_n_f32(0.0f);
  float32x4_t acc1 = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = vfmaq_f32(acc0, vld1q_f32(a + i), vld1q_f32(b + i));
    acc1 = vfmaq_f32(acc1, vld1q_f32(a + i + 4), vld1q_f32(b + i + 4));
  }
  float acc = vaddvq_f32(vaddq_f32(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

float sum_squares_neon(const float* a, std::size_t n) {
  float32x4_t acc = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t v = vld1q_f32(a + i);
    acc = vfmaq_f32(acc, v, v);
  }
  float total = vaddvq_f32(acc);
  for (; i < n; ++i) total += a[i] * a[i];
  return total;
}

float rectified_diff_energy_neon(const float* cur, const float* prev, std::size_t n) {
  const float32x4_t zero = vdupq_n_f32(0.0f);
  float32x4_t acc = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t d = vmaxq_f32(vsubq_f32(vld1q_f32(cur + i), vld1q_f32(prev + i)), zero);
    acc = vfmaq_f32(acc, d, d);
  }
  float total = vaddvq_f32(acc);
  for (; i < n; ++i) {
    float d = cur[i] - prev[i];
    if (d > 0.0f) total += d * d;
  }
  return total;
}

void apply_window_neon(const float* in, const float* window, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(out + i, vmulq_f32(vld1q_f32(in + i), vld1q_f32(window + i)));
  for (; i < n; ++i) out[i] = in[i] * window[i];
}

void magnitudes_neon(const float* interleaved, float scale, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4x2_t c = vld2q_f32(interleaved + 2 * i);
    float32x4_t pw = vfmaq_f32(vmulq_f32(c.val[0], c.val[0]), c.val[1], c.val[1]);
    vst1q_f32(out + i, vmulq_n_f32(vsqrtq_f32(pw), scale));
  }
  for (; i < n; ++i) {
    float re = interleaved[2 * i];
    float im = interleaved[2 * i + 1];
    out[i] = scale * std::sqrt(re * re + im * im);
  }
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{"neon",           dot_neon,          sum_squares_neon,
                                 rectified_diff_energy_neon, apply_window_neon, magnitudes_neon};
  return table;
}

}  // namespace mvgen::simd
