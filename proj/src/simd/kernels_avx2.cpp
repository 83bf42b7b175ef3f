// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "kernels_impl.h"

namespace mvgen::simd {

namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

float dot_avx2(const float* a, const float* b, std::size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
  }
  float acc = hsum(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

float sum_squares_avx2(const float* a, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(a + i);
    acc = _mm256_fmadd_ps(v, v, acc);
  }
  float total = hsum(acc);
  for (; i < n; ++i) total += a[i] * a[i];
  return total;
}

float rectified_diff_energy_avx2(const float* cur, const float* prev, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 d = _mm256_sub_ps(_mm256_loadu_ps(cur + i), _mm256_loadu_ps(prev + i));
    d = _mm256_max_ps(d, zero);
    acc = _mm256_fmadd_ps(d, d, acc);
  }
  float total = hsum(acc);
  for (; i < n; ++i) {
    float d = cur[i] - prev[i];
    if (d > 0.0f) total += d * d;
  }
  return total;
}

void apply_window_avx2(const float* in, const float* window, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(in + i), _mm256_loadu_ps(window + i)));
  }
  for (; i < n; ++i) out[i] = in[i] * window[i];
}

void magnitudes_avx2(const float* interleaved, float scale, float* out, std::size_t n) {
  const __m256 s = _mm256_set1_ps(scale);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    // Two loads of 4 complex values each, then deinterleave re/im.
    __m256 v0 = _mm256_loadu_ps(interleaved + 2 * i);
    __m256 v1 = _mm256_loadu_ps(interleaved + 2 * i + 8);
    __m256 sq0 = _mm256_mul_ps(v0, v0);
    __m256 sq1 = _mm256_mul_ps(v1, v1);
    // hadd pairs (re^2 + im^2); lane order is [0 1 4 5 | 2 3 6 7].
    __m256 pw = _mm256_hadd_ps(sq0, sq1);
    pw = _mm256_castpd_ps(_mm256_permute4x64_pd(_mm256_castps_pd(pw), 0xD8));
    _mm256_storeu_ps(out + i, _mm256_mul_ps(s, _mm256_sqrt_ps(pw)));
  }
  for (; i < n; ++i) {
    float re = interleaved[2 * i];
    float im = interleaved[2 * i + 1];
    out[i] = scale * std::sqrt(re * re + im * im);
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2",           dot_avx2,          sum_squares_avx2,
                                 rectified_diff_energy_avx2, apply_window_avx2, magnitudes_avx2};
  return table;
}

}  // namespace mvgen::simd
