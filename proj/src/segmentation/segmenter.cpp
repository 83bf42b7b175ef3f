#include "mvgen/segmentation/segmenter.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mvgen/util/error.h"

namespace mvgen {

namespace {

// Boundaries are kept on a millisecond grid so plans survive a round trip
// through their JSON form unchanged.
double to_ms_grid(double t) { return std::round(t * 1000.0) / 1000.0; }

constexpr double kGridEps = 0.0005;

void push_segment(SegmentPlan& plan, double start, double end, CutReason reason) {
  Segment seg;
  seg.index = static_cast<int>(plan.segments.size());
  seg.span = TimeSpan{start, end};
  seg.cut_reason = reason;
  plan.segments.push_back(seg);
}

}  // namespace

void SegmentationConfig::validate() const {
  std::vector<std::string> problems;
  if (!(min_random_s > 0.0)) problems.emplace_back("min_random_s must be > 0");
  if (!(min_random_s <= max_random_s)) problems.emplace_back("min_random_s must be <= max_random_s");
  if (!(min_segment_s > 0.0)) problems.emplace_back("min_segment_s must be > 0");
  if (!(max_rule_s > min_segment_s)) problems.emplace_back("max_rule_s must be > min_segment_s");
  if (beats_per_cut < 1) problems.emplace_back("beats_per_cut must be >= 1");
  if (!(novelty_threshold_k >= 0.0)) problems.emplace_back("novelty_threshold_k must be >= 0");
  if (!(novelty_window_s > 0.0)) problems.emplace_back("novelty_window_s must be > 0");
  if (stft_window < 16 || (stft_window & (stft_window - 1)) != 0)
    problems.emplace_back("stft_window must be a power of two >= 16");
  if (stft_hop < 1 || stft_hop > stft_window) problems.emplace_back("stft_hop must be in [1, stft_window]");
  if (!(tempo_min_bpm > 0.0 && tempo_min_bpm < tempo_max_bpm))
    problems.emplace_back("tempo range must satisfy 0 < tempo_min_bpm < tempo_max_bpm");
  if (!problems.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "invalid segmentation config", {{"problems", problems}});
  }
}

std::string_view to_string(CutReason reason) {
  switch (reason) {
    case CutReason::RandomLength: return "RandomLength";
    case CutReason::SpectralChange: return "SpectralChange";
    case CutReason::BeatCount: return "BeatCount";
    case CutReason::MaxDuration: return "MaxDuration";
    case CutReason::EndOfTrack: return "EndOfTrack";
  }
  return "EndOfTrack";
}

std::string_view to_string(SegmentationMethod method) {
  return method == SegmentationMethod::Random ? "Random" : "RuleBased";
}

CutReason cut_reason_from_string(std::string_view name) {
  for (auto r : {CutReason::RandomLength, CutReason::SpectralChange, CutReason::BeatCount,
                 CutReason::MaxDuration, CutReason::EndOfTrack}) {
    if (to_string(r) == name) return r;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown cut reason: " + std::string(name));
}

SegmentationMethod segmentation_method_from_string(std::string_view name) {
  if (name == "Random") return SegmentationMethod::Random;
  if (name == "RuleBased") return SegmentationMethod::RuleBased;
  throw Error(ErrorCode::InvalidArgument, "unknown segmentation method: " + std::string(name));
}

SegmentPlan segment_random(double track_duration_s, const SegmentationConfig& config) {
  MVGEN_CHECK(std::isfinite(track_duration_s) && track_duration_s > 0.0, ErrorCode::InvalidArgument,
              "track duration must be positive");
  config.validate();

  SegmentPlan plan;
  plan.track_duration_s = track_duration_s;
  plan.method = SegmentationMethod::Random;
  plan.seed = config.seed;

  // Durations are drawn as whole milliseconds, uniform over the closed range.
  const auto min_ms = static_cast<std::uint64_t>(std::llround(config.min_random_s * 1000.0));
  const auto max_ms = static_cast<std::uint64_t>(std::llround(config.max_random_s * 1000.0));
  const std::uint64_t span = max_ms - min_ms + 1;
  std::mt19937_64 rng(config.seed);

  std::uint64_t start_ms = 0;
  for (;;) {
    const std::uint64_t d_ms = min_ms + rng() % span;
    const std::uint64_t end_ms = start_ms + d_ms;
    if (static_cast<double>(end_ms) / 1000.0 >= track_duration_s - kGridEps) break;
    push_segment(plan, start_ms / 1000.0, end_ms / 1000.0, CutReason::RandomLength);
    start_ms = end_ms;
  }
  push_segment(plan, start_ms / 1000.0, track_duration_s, CutReason::EndOfTrack);
  return plan;
}

SegmentPlan segment_rule_based(const AudioBuffer& buffer, const SegmentationConfig& config,
                               RuleBasedTrace* trace) {
  config.validate();
  const double duration = buffer.duration_s();
  if (buffer.empty() || duration < config.min_segment_s) {
    throw Error(ErrorCode::BufferTooShort, "buffer is shorter than min_segment_s");
  }

  const LogSpectrogram spec = log_spectrogram(buffer, config.stft_window, config.stft_hop);
  OnsetEnvelope onset = spectral_flux(spec);
  const auto median_frames =
      static_cast<std::size_t>(std::max(3.0, std::round(config.sustain_filter_s / spec.hop_s)));
  OnsetEnvelope change = sustained_spectral_change(spec, median_frames);
  const auto window_frames =
      static_cast<std::size_t>(std::max(1.0, std::round(config.novelty_window_s / spec.hop_s)));
  std::vector<float> threshold =
      adaptive_threshold(change.values, window_frames, config.novelty_threshold_k, config.novelty_floor);

  std::optional<BeatGrid> beats;
  try {
    beats = detect_beats(onset, {config.tempo_min_bpm, config.tempo_max_bpm});
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoBeats) throw;
  }

  SegmentPlan plan;
  plan.track_duration_s = duration;
  plan.method = SegmentationMethod::RuleBased;
  plan.seed = config.seed;

  // A beat landing within a quarter period of a cut belongs to that cut.
  const double beat_slack = beats ? 0.25 * 60.0 / beats->tempo_bpm : 0.0;
  double last = 0.0;
  int beats_since = 0;
  std::size_t next_beat = 0;

  auto cut_at = [&](double t, CutReason reason) {
    const double c = to_ms_grid(t);
    if (c <= last + kGridEps || c >= duration - kGridEps) return false;
    push_segment(plan, last, c, reason);
    last = c;
    beats_since = 0;
    return true;
  };

  // Places forced cuts for every max_rule_s deadline strictly before time t.
  auto flush_deadlines = [&](double t) {
    while (last + config.max_rule_s < t - 1e-9 && last + config.max_rule_s < duration - kGridEps) {
      if (!cut_at(last + config.max_rule_s, CutReason::MaxDuration)) break;
    }
  };

  auto handle_beat = [&](double bt) {
    if (bt <= last + beat_slack) return;
    ++beats_since;
    if (beats_since >= config.beats_per_cut && bt - last >= config.min_segment_s) {
      cut_at(bt, CutReason::BeatCount);
    }
  };

  const std::vector<double> no_beats;
  const std::vector<double>& beat_times = beats ? beats->beat_times_s : no_beats;

  for (std::size_t f = 1; f < change.values.size(); ++f) {
    const double t = change.time_of(f);
    if (t >= duration) break;
    // Beats strictly before this frame come first; a beat sharing the frame's
    // time yields to the spectral rule.
    while (next_beat < beat_times.size() && beat_times[next_beat] < t) {
      flush_deadlines(beat_times[next_beat]);
      handle_beat(beat_times[next_beat]);
      ++next_beat;
    }
    flush_deadlines(t);
    if (t - last >= config.min_segment_s - 1e-9 && change.values[f] > threshold[f]) {
      cut_at(t, CutReason::SpectralChange);
    }
  }
  while (next_beat < beat_times.size() && beat_times[next_beat] < duration) {
    flush_deadlines(beat_times[next_beat]);
    handle_beat(beat_times[next_beat]);
    ++next_beat;
  }
  flush_deadlines(duration);
  push_segment(plan, last, duration, CutReason::EndOfTrack);

  if (trace != nullptr) {
    trace->onset = std::move(onset);
    trace->spectral_change = std::move(change);
    trace->threshold = std::move(threshold);
    trace->beats = std::move(beats);
  }
  return plan;
}

void check_tiling(const SegmentPlan& plan) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::IntegrityError, msg); };
  if (plan.segments.empty()) fail("segment plan is empty");
  if (plan.segments.front().span.start_s != 0.0) fail("first segment does not start at 0");
  if (plan.segments.back().span.end_s != plan.track_duration_s) fail("last segment does not end at track end");
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const Segment& s = plan.segments[i];
    if (s.index != static_cast<int>(i)) fail("segment indices are not sequential");
    if (!(s.span.end_s > s.span.start_s)) fail("segment " + std::to_string(i) + " has non-positive duration");
    if (i + 1 < plan.segments.size() && s.span.end_s != plan.segments[i + 1].span.start_s) {
      fail("segments " + std::to_string(i) + " and " + std::to_string(i + 1) + " are not contiguous");
    }
    if (i + 1 < plan.segments.size() && s.cut_reason == CutReason::EndOfTrack) {
      fail("EndOfTrack labels a non-final segment");
    }
  }
  if (plan.segments.back().cut_reason != CutReason::EndOfTrack) fail("final segment must be EndOfTrack");
}

}  // namespace mvgen
