#include "mvgen/segmentation/beat_tracker.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mvgen/simd/kernels.h"
#include "mvgen/util/error.h"

namespace mvgen {

namespace {

// Vertex offset of the parabola through (-1, a), (0, b), (1, c).
double parabolic_offset(double a, double b, double c) {
  const double denom = a - 2.0 * b + c;
  if (std::abs(denom) < 1e-12) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace

BeatGrid detect_beats(const OnsetEnvelope& envelope, std::pair<double, double> tempo_range_bpm,
                      const BeatTrackerOptions& options) {
  const auto [low_bpm, high_bpm] = tempo_range_bpm;
  MVGEN_CHECK(!envelope.values.empty(), ErrorCode::InvalidArgument, "onset envelope is empty");
  MVGEN_CHECK(envelope.hop_s > 0.0, ErrorCode::InvalidArgument, "onset envelope hop must be positive");
  MVGEN_CHECK(low_bpm > 0.0 && low_bpm < high_bpm, ErrorCode::InvalidArgument,
              "tempo range must satisfy 0 < low < high");

  const auto& raw = envelope.values;
  const std::size_t n = raw.size();
  int onsets = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (raw[i] >= options.min_onset_strength && raw[i] >= raw[i - 1] && raw[i] > raw[i + 1]) ++onsets;
  }
  if (onsets < options.min_onsets) throw Error(ErrorCode::NoBeats, "no detectable onsets");

  // Lag range in frames; the envelope must hold at least two periods.
  const double hop = envelope.hop_s;
  const auto min_lag = static_cast<std::size_t>(std::max(1.0, std::floor(60.0 / (high_bpm * hop))));
  const auto max_lag = static_cast<std::size_t>(std::ceil(60.0 / (low_bpm * hop)));
  if (n < 2 * min_lag + 2) throw Error(ErrorCode::NoBeats, "envelope too short for the tempo range");

  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(n);
  std::vector<float> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = static_cast<float>(raw[i] - mean);
  const double energy = simd::sum_squares(centred);
  if (energy <= 0.0) throw Error(ErrorCode::NoBeats, "flat onset envelope");

  const std::size_t last_lag = std::min(max_lag + 1, n - 1);
  std::vector<double> acf(last_lag + 2, 0.0);
  for (std::size_t lag = (min_lag > 1 ? min_lag - 1 : 1); lag <= last_lag; ++lag) {
    const std::size_t len = n - lag;
    const double r = simd::dot(std::span<const float>(centred.data(), len),
                               std::span<const float>(centred.data() + lag, len));
    // Unbiased normalisation keeps long lags comparable to short ones.
    acf[lag] = r / static_cast<double>(len) / (energy / static_cast<double>(n));
  }

  auto prior = [&](double lag) {
    const double bpm = 60.0 / (lag * hop);
    const double oct = std::log2(bpm / options.prior_center_bpm) / options.prior_octaves;
    return std::exp(-0.5 * oct * oct);
  };

  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t lag = min_lag; lag <= std::min(max_lag, last_lag); ++lag) {
    const double s = acf[lag] * prior(static_cast<double>(lag));
    if (s > best_score) {
      best_score = s;
      best = lag;
    }
  }
  if (best == 0 || acf[best] < options.min_periodicity) {
    throw Error(ErrorCode::NoBeats, "onset envelope shows no periodicity in the tempo range");
  }

  double period = static_cast<double>(best);
  if (best > 1 && best + 1 < acf.size()) {
    period += parabolic_offset(acf[best - 1], acf[best], acf[best + 1]);
  }
  const double lo_period = 60.0 / (high_bpm * hop);
  const double hi_period = 60.0 / (low_bpm * hop);
  period = std::clamp(period, lo_period, hi_period);

  // Dynamic-programming beat placement over the std-normalised envelope.
  const double stddev = std::sqrt(energy / static_cast<double>(n));
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) env[i] = raw[i] / stddev;

  std::vector<double> score(n);
  std::vector<std::ptrdiff_t> back(n, -1);
  const auto search_lo = static_cast<std::ptrdiff_t>(std::round(period / 2.0));
  const auto search_hi = static_cast<std::ptrdiff_t>(std::round(2.0 * period));
  for (std::size_t t = 0; t < n; ++t) {
    double best_prev = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t arg = -1;
    const auto ti = static_cast<std::ptrdiff_t>(t);
    for (std::ptrdiff_t p = ti - search_hi; p <= ti - search_lo; ++p) {
      if (p < 0) continue;
      const double d = std::log(static_cast<double>(ti - p) / period);
      const double s = score[static_cast<std::size_t>(p)] - options.tightness * d * d;
      if (s > best_prev) {
        best_prev = s;
        arg = p;
      }
    }
    score[t] = env[t] + (arg >= 0 ? std::max(0.0, best_prev) : 0.0);
    back[t] = (arg >= 0 && best_prev > 0.0) ? arg : -1;
  }

  // End on the strongest local score within the final period.
  const auto tail = static_cast<std::size_t>(std::ceil(period));
  std::size_t end = n - 1;
  double end_score = -std::numeric_limits<double>::infinity();
  for (std::size_t t = n > tail ? n - tail : 0; t < n; ++t) {
    if (score[t] > end_score) {
      end_score = score[t];
      end = t;
    }
  }

  std::vector<std::size_t> frames;
  for (std::ptrdiff_t t = static_cast<std::ptrdiff_t>(end); t >= 0; t = back[static_cast<std::size_t>(t)]) {
    frames.push_back(static_cast<std::size_t>(t));
  }
  std::reverse(frames.begin(), frames.end());

  // Drop leading/trailing beats sitting on near-silent frames.
  const double weak = 0.1 * *std::max_element(env.begin(), env.end());
  while (!frames.empty() && env[frames.front()] < weak) frames.erase(frames.begin());
  while (!frames.empty() && env[frames.back()] < weak) frames.pop_back();
  if (frames.size() < 2) throw Error(ErrorCode::NoBeats, "beat tracking found fewer than two beats");

  BeatGrid grid;
  grid.tempo_bpm = 60.0 / (period * hop);
  for (std::size_t f : frames) {
    double t = static_cast<double>(f);
    if (f > 0 && f + 1 < n) t += parabolic_offset(env[f - 1], env[f], env[f + 1]);
    double time = t * hop;
    if (!grid.beat_times_s.empty() && time <= grid.beat_times_s.back()) continue;
    grid.beat_times_s.push_back(std::max(0.0, time));
  }
  return grid;
}

}  // namespace mvgen
