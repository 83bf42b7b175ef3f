#include "mvgen/segmentation/stft.h"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "mvgen/simd/kernels.h"
#include "mvgen/util/error.h"

namespace mvgen {

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftwf_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftwf_destroy_plan(p);
  }
};

struct FftwFree {
  void operator()(void* p) const { fftwf_free(p); }
};

std::vector<float> periodic_hann(int n) {
  std::vector<float> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] =
        static_cast<float>(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n));
  }
  return w;
}

}  // namespace

LogSpectrogram log_spectrogram(const AudioBuffer& buffer, int window, int hop) {
  MVGEN_CHECK(window > 0 && hop > 0, ErrorCode::InvalidArgument, "STFT window and hop must be positive");
  if (buffer.size() <= static_cast<std::size_t>(window)) {
    throw Error(ErrorCode::BufferTooShort, "buffer is not longer than one STFT window");
  }

  const auto n = static_cast<std::size_t>(window);
  const std::size_t bins = n / 2 + 1;
  const std::size_t frames = 1 + buffer.size() / static_cast<std::size_t>(hop);

  std::unique_ptr<float, FftwFree> in(static_cast<float*>(fftwf_malloc(sizeof(float) * n)));
  std::unique_ptr<fftwf_complex, FftwFree> out(
      static_cast<fftwf_complex*>(fftwf_malloc(sizeof(fftwf_complex) * bins)));
  std::unique_ptr<fftwf_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftwf_plan_dft_r2c_1d(window, in.get(), out.get(), FFTW_ESTIMATE));
  }

  const std::vector<float> hann = periodic_hann(window);
  float window_sum = 0.0f;
  for (float v : hann) window_sum += v;
  const float scale = 2.0f / window_sum;

  LogSpectrogram spec;
  spec.frames = frames;
  spec.bins = bins;
  spec.hop_s = static_cast<double>(hop) / buffer.sample_rate();
  spec.data.resize(frames * bins);

  const auto& k = simd::active_kernels();
  auto samples = buffer.samples();
  std::vector<float> segment(n);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  const auto total = static_cast<std::ptrdiff_t>(samples.size());

  for (std::size_t f = 0; f < frames; ++f) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(f) * hop - half;
    for (std::size_t i = 0; i < n; ++i) {
      const std::ptrdiff_t s = start + static_cast<std::ptrdiff_t>(i);
      segment[i] = (s >= 0 && s < total) ? samples[static_cast<std::size_t>(s)] : 0.0f;
    }
    k.apply_window(segment.data(), hann.data(), in.get(), n);
    fftwf_execute_dft_r2c(plan.get(), in.get(), out.get());
    float* row = spec.data.data() + f * bins;
    k.magnitudes(reinterpret_cast<const float*>(out.get()), scale, row, bins);
    for (std::size_t b = 0; b < bins; ++b) row[b] = std::log1p(kLogCompression * row[b]);
  }
  return spec;
}

}  // namespace mvgen
