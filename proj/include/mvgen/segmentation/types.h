#pragma once

/// @file types.h
/// @brief Segmentation configuration and plan types.

#include <cstdint>
#include <string_view>
#include <vector>

#include "mvgen/audio/audio_buffer.h"

namespace mvgen {

struct SegmentationConfig {
  // Random segmenter.
  double min_random_s = 4.0;
  double max_random_s = 8.0;

  // Rule-based segmenter.
  double max_rule_s = 7.0;
  int beats_per_cut = 8;
  double min_segment_s = 2.0;
  double novelty_threshold_k = 3.0;
  double novelty_window_s = 5.0;  ///< centred window for the adaptive threshold
  /// Absolute floor under the adaptive threshold, in log-magnitude flux units.
  /// Keeps float noise on stationary material from reading as a change.
  double novelty_floor = 0.1;
  /// Length of the temporal median filter that removes transients before the
  /// sustained spectral-change curve is computed.
  double sustain_filter_s = 0.4;

  // STFT.
  int stft_window = 2048;
  int stft_hop = 512;

  // Beat tracking search range.
  double tempo_min_bpm = 60.0;
  double tempo_max_bpm = 200.0;

  std::uint64_t seed = 0;

  /// Throws ConfigInvalid listing every violated constraint.
  void validate() const;
};

enum class CutReason { RandomLength, SpectralChange, BeatCount, MaxDuration, EndOfTrack };
enum class SegmentationMethod { Random, RuleBased };

std::string_view to_string(CutReason reason);
std::string_view to_string(SegmentationMethod method);
CutReason cut_reason_from_string(std::string_view name);
SegmentationMethod segmentation_method_from_string(std::string_view name);

struct Segment {
  int index = 0;
  TimeSpan span;
  CutReason cut_reason = CutReason::EndOfTrack;

  double duration() const { return span.duration(); }
};

struct SegmentPlan {
  std::vector<Segment> segments;
  double track_duration_s = 0.0;
  SegmentationMethod method = SegmentationMethod::Random;
  std::uint64_t seed = 0;

  std::size_t size() const { return segments.size(); }
  bool empty() const { return segments.empty(); }
};

/// Per-frame non-negative novelty sampled every hop_s seconds; frame i is
/// centred at i * hop_s.
struct OnsetEnvelope {
  std::vector<float> values;
  double hop_s = 0.0;

  double time_of(std::size_t frame) const { return static_cast<double>(frame) * hop_s; }
};

struct BeatGrid {
  std::vector<double> beat_times_s;
  double tempo_bpm = 0.0;
};

}  // namespace mvgen
