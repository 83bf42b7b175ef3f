#pragma once

#include <span>
#include <vector>

#include "mvgen/audio/audio_buffer.h"

namespace mvgen {

/// Log-compressed magnitude spectrogram, frames x bins, row-major.
///
/// Frames are centred: frame i covers samples [i*hop - window/2, i*hop + window/2)
/// with zero padding outside the signal. Magnitudes are scaled so that a
/// full-scale sinusoid peaks near 1 before compression, then mapped through
/// log(1 + kLogCompression * |X|).
struct LogSpectrogram {
  std::vector<float> data;
  std::size_t frames = 0;
  std::size_t bins = 0;
  double hop_s = 0.0;

  std::span<const float> frame(std::size_t i) const { return {data.data() + i * bins, bins}; }
  std::span<float> frame(std::size_t i) { return {data.data() + i * bins, bins}; }
};

inline constexpr float kLogCompression = 10.0f;

/// Throws BufferTooShort when the buffer is not longer than one window.
LogSpectrogram log_spectrogram(const AudioBuffer& buffer, int window, int hop);

}  // namespace mvgen
