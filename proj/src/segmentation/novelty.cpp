#include "mvgen/segmentation/novelty.h"

#include <algorithm>
#include <cmath>

#include "mvgen/simd/kernels.h"
#include "mvgen/util/error.h"

namespace mvgen {

OnsetEnvelope spectral_flux(const LogSpectrogram& spec) {
  OnsetEnvelope env;
  env.hop_s = spec.hop_s;
  env.values.assign(spec.frames, 0.0f);
  const auto& k = simd::active_kernels();
  for (std::size_t f = 1; f < spec.frames; ++f) {
    float e = k.rectified_diff_energy(spec.frame(f).data(), spec.frame(f - 1).data(), spec.bins);
    env.values[f] = std::sqrt(e);
  }
  return env;
}

OnsetEnvelope compute_spectral_novelty(const AudioBuffer& buffer, const SegmentationConfig& config) {
  return spectral_flux(log_spectrogram(buffer, config.stft_window, config.stft_hop));
}

OnsetEnvelope sustained_spectral_change(const LogSpectrogram& spec, std::size_t median_frames) {
  if (median_frames < 3 || spec.frames < median_frames) return spectral_flux(spec);
  median_frames |= 1u;
  const std::size_t half = median_frames / 2;

  LogSpectrogram filtered;
  filtered.frames = spec.frames;
  filtered.bins = spec.bins;
  filtered.hop_s = spec.hop_s;
  filtered.data.resize(spec.data.size());

  std::vector<float> column(spec.frames);
  std::vector<float> window;
  window.reserve(median_frames);
  for (std::size_t b = 0; b < spec.bins; ++b) {
    for (std::size_t f = 0; f < spec.frames; ++f) column[f] = spec.data[f * spec.bins + b];
    for (std::size_t f = 0; f < spec.frames; ++f) {
      // Edges use a truncated window centred as far as the signal allows.
      std::size_t lo = f >= half ? f - half : 0;
      std::size_t hi = std::min(spec.frames, f + half + 1);
      window.assign(column.begin() + static_cast<std::ptrdiff_t>(lo),
                    column.begin() + static_cast<std::ptrdiff_t>(hi));
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      filtered.data[f * spec.bins + b] = *mid;
    }
  }
  return spectral_flux(filtered);
}

std::vector<float> adaptive_threshold(std::span<const float> values, std::size_t window_frames,
                                      double k, double floor) {
  const std::size_t n = values.size();
  std::vector<double> prefix(n + 1, 0.0);
  std::vector<double> prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + values[i];
    prefix_sq[i + 1] = prefix_sq[i] + static_cast<double>(values[i]) * values[i];
  }
  const std::size_t half = window_frames / 2;
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    std::size_t hi = std::min(n, i + half + 1);
    const double count = static_cast<double>(hi - lo);
    const double mean = (prefix[hi] - prefix[lo]) / count;
    const double var = std::max(0.0, (prefix_sq[hi] - prefix_sq[lo]) / count - mean * mean);
    out[i] = static_cast<float>(std::max(floor, mean + k * std::sqrt(var)));
  }
  return out;
}

}  // namespace mvgen
