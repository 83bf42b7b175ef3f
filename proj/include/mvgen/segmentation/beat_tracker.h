#pragma once

/// @file beat_tracker.h
/// @brief Global-tempo beat tracking over an onset envelope.
///
/// Tempo: autocorrelation of the mean-removed envelope over the lag range of
/// the requested BPM interval, weighted by a log-Gaussian prior centred on
/// 120 BPM (one octave wide) to settle octave ambiguity, refined to a
/// fractional lag by parabolic interpolation.
///
/// Beats: dynamic programming that trades envelope strength against
/// deviation of each inter-beat interval from the tempo period, in the form
/// score(t) = env(t) + max_p [score(p) - tightness * log((t - p) / period)^2],
/// followed by backtracking from the best-scoring frame in the final period.

#include <utility>

#include "mvgen/segmentation/types.h"

namespace mvgen {

struct BeatTrackerOptions {
  double tightness = 100.0;
  double prior_center_bpm = 120.0;
  double prior_octaves = 1.0;
  /// Local envelope maxima at or above this count as onsets.
  double min_onset_strength = 0.2;
  /// Fewer onsets than this means there is nothing to track.
  int min_onsets = 4;
  /// Minimum normalized autocorrelation at the chosen lag.
  double min_periodicity = 0.1;
};

/// Errors: InvalidArgument (empty envelope, bad range), NoBeats.
BeatGrid detect_beats(const OnsetEnvelope& envelope, std::pair<double, double> tempo_range_bpm,
                      const BeatTrackerOptions& options = {});

}  // namespace mvgen
