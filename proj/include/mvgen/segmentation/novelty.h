#pragma once

/// @file novelty.h
/// @brief Spectral-flux novelty curves and their adaptive threshold.

#include <span>
#include <vector>

#include "mvgen/segmentation/stft.h"
#include "mvgen/segmentation/types.h"

namespace mvgen {

/// Half-wave-rectified spectral flux of the log-magnitude STFT, L2 over bins.
/// values[0] is 0. Errors: BufferTooShort.
OnsetEnvelope compute_spectral_novelty(const AudioBuffer& buffer, const SegmentationConfig& config);

/// Same flux over an existing spectrogram.
OnsetEnvelope spectral_flux(const LogSpectrogram& spec);

/// Flux of the spectrogram after a temporal median filter of `median_frames`
/// (odd) per bin. Short transients such as drum hits are removed by the
/// median, so the curve responds to sustained changes of spectral content
/// (timbre, harmony) rather than to onsets.
OnsetEnvelope sustained_spectral_change(const LogSpectrogram& spec, std::size_t median_frames);

/// max(floor, mean + k * std) over a centred window of `window_frames`
/// (truncated at the edges), evaluated per frame.
std::vector<float> adaptive_threshold(std::span<const float> values, std::size_t window_frames,
                                      double k, double floor);

}  // namespace mvgen
