#pragma once

/// @file segmenter.h
/// @brief Random and rule-based song segmentation.

#include <optional>

#include "mvgen/segmentation/beat_tracker.h"
#include "mvgen/segmentation/novelty.h"
#include "mvgen/segmentation/types.h"

namespace mvgen {

/// Tiles [0, duration] with lengths drawn uniformly from
/// [min_random_s, max_random_s] using config.seed. The remainder becomes the
/// final EndOfTrack segment, which may be shorter than min_random_s.
/// Errors: InvalidArgument for a non-positive duration.
SegmentPlan segment_random(double track_duration_s, const SegmentationConfig& config);

/// Intermediate curves of the rule-based segmenter, kept for inspection.
struct RuleBasedTrace {
  OnsetEnvelope onset;               ///< transient flux, drives beat tracking
  OnsetEnvelope spectral_change;     ///< sustained spectral change, drives rule (a)
  std::vector<float> threshold;      ///< adaptive threshold over spectral_change
  std::optional<BeatGrid> beats;     ///< empty when beat tracking failed
};

/// Scans forward and cuts, with at least min_segment_s since the previous
/// cut, at the first of: a spectral change above the adaptive threshold
/// (SpectralChange), beats_per_cut beats since the previous cut (BeatCount),
/// or max_rule_s elapsed (MaxDuration). Beat-tracking failure disables only
/// the beat rule. Errors: BufferTooShort when shorter than min_segment_s.
SegmentPlan segment_rule_based(const AudioBuffer& buffer, const SegmentationConfig& config,
                               RuleBasedTrace* trace = nullptr);

/// Throws IntegrityError unless the plan tiles [0, track_duration_s]
/// contiguously with positive durations and sequential indices.
void check_tiling(const SegmentPlan& plan);

}  // namespace mvgen
