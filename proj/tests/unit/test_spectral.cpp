/// @file test_spectral.cpp
/// @brief STFT, flux, threshold and beat tracking against independent oracles.

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "mvgen/audio/test_signals.h"
#include "mvgen/segmentation/beat_tracker.h"
#include "mvgen/segmentation/novelty.h"
#include "mvgen/segmentation/stft.h"
#include "mvgen/util/error.h"

namespace mvgen {
namespace {

std::vector<float> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-0.5f, 0.5f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Direct O(n^2) DFT in double precision, centred frames, periodic Hann.
std::vector<double> naive_log_frame(const std::vector<float>& x, std::size_t frame, int window, int hop) {
  const int n = window;
  std::vector<double> w(static_cast<std::size_t>(n));
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
    wsum += w[static_cast<std::size_t>(i)];
  }
  const long start = static_cast<long>(frame) * hop - n / 2;
  std::vector<double> out(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const long s = start + i;
      const double v = (s >= 0 && s < static_cast<long>(x.size())) ? x[static_cast<std::size_t>(s)] : 0.0;
      acc += v * w[static_cast<std::size_t>(i)] * std::polar(1.0, -2.0 * std::numbers::pi * k * i / n);
    }
    out[static_cast<std::size_t>(k)] = std::log1p(kLogCompression * 2.0 * std::abs(acc) / wsum);
  }
  return out;
}

TEST(Stft, MatchesNaiveDft) {
  const auto x = noise(2000, 17);
  const AudioBuffer b(x, 8000);
  const int window = 128, hop = 32;
  const LogSpectrogram spec = log_spectrogram(b, window, hop);
  ASSERT_EQ(spec.bins, 65u);
  ASSERT_EQ(spec.frames, 1 + x.size() / hop);
  for (std::size_t f : {0ul, 1ul, 10ul, 31ul, spec.frames - 1}) {
    const auto ref = naive_log_frame(x, f, window, hop);
    for (std::size_t k = 0; k < spec.bins; ++k) EXPECT_NEAR(spec.frame(f)[k], ref[k], 2e-5) << f << "," << k;
  }
}

TEST(Stft, FullScaleSinePeaksNearOne) {
  const int sr = 22050, window = 2048;
  const double freq = 10.0 * sr / window;  // bin-centred
  const AudioBuffer b(signals::sine(freq, 1.0, sr, 1.0f), sr);
  const LogSpectrogram spec = log_spectrogram(b, window, 512);
  const std::size_t mid = spec.frames / 2;
  const float peak = std::expm1(spec.frame(mid)[10]) / kLogCompression;
  EXPECT_NEAR(peak, 1.0f, 0.01f);
}

TEST(Stft, TooShortBufferRejected) {
  const AudioBuffer b(std::vector<float>(100, 0.0f), 8000);
  try {
    log_spectrogram(b, 128, 32);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BufferTooShort);
  }
}

TEST(Flux, MatchesDirectFormula) {
  const AudioBuffer b(noise(4000, 3), 8000);
  const LogSpectrogram spec = log_spectrogram(b, 128, 64);
  const OnsetEnvelope env = spectral_flux(spec);
  ASSERT_EQ(env.values.size(), spec.frames);
  EXPECT_EQ(env.values[0], 0.0f);
  for (std::size_t f = 1; f < spec.frames; ++f) {
    double e = 0.0;
    for (std::size_t k = 0; k < spec.bins; ++k) {
      const double d = spec.frame(f)[k] - spec.frame(f - 1)[k];
      if (d > 0) e += d * d;
    }
    EXPECT_NEAR(env.values[f], std::sqrt(e), 1e-4 * (1.0 + std::sqrt(e)));
  }
}

TEST(Flux, SustainedChangeIgnoresIsolatedClicks) {
  const int sr = 22050;
  auto x = signals::drone(110.0, 6.0, sr);
  x = signals::mix(x, signals::click_track(120.0, 6.0, sr));
  const AudioBuffer b(x, sr);
  const LogSpectrogram spec = log_spectrogram(b, 2048, 512);
  const auto raw = spectral_flux(spec);
  const auto sustained = sustained_spectral_change(spec, 17);
  float raw_max = 0, sus_max = 0;
  for (std::size_t f = 20; f + 20 < spec.frames; ++f) {
    raw_max = std::max(raw_max, raw.values[f]);
    sus_max = std::max(sus_max, sustained.values[f]);
  }
  EXPECT_LT(sus_max, 0.2f * raw_max);
}

TEST(Threshold, MatchesWindowedMeanStd) {
  const auto v = noise(300, 8);
  const std::size_t window = 21;
  const auto t = adaptive_threshold(v, window, 2.0, 0.05);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t lo = i >= window / 2 ? i - window / 2 : 0;
    const std::size_t hi = std::min(v.size(), i + window / 2 + 1);
    double m = 0, s = 0;
    for (std::size_t j = lo; j < hi; ++j) m += v[j];
    m /= static_cast<double>(hi - lo);
    for (std::size_t j = lo; j < hi; ++j) s += (v[j] - m) * (v[j] - m);
    s = std::sqrt(s / static_cast<double>(hi - lo));
    EXPECT_NEAR(t[i], std::max(0.05, m + 2.0 * s), 1e-5);
  }
}

OnsetEnvelope click_envelope(double bpm, double seconds) {
  const int sr = 22050;
  const AudioBuffer b(signals::click_track(bpm, seconds, sr), sr);
  SegmentationConfig cfg;
  return compute_spectral_novelty(b, cfg);
}

class TempoSweep : public ::testing::TestWithParam<double> {};

TEST_P(TempoSweep, TempoAndBeatTimes) {
  const double bpm = GetParam();
  const BeatGrid grid = detect_beats(click_envelope(bpm, 20.0), {60.0, 200.0});
  EXPECT_NEAR(grid.tempo_bpm, bpm, 2.0);
  const auto truth = signals::click_times(bpm, 20.0);
  std::size_t hits = 0;
  for (double t : truth) {
    for (double b : grid.beat_times_s) {
      if (std::abs(b - t) <= 0.025) {
        ++hits;
        break;
      }
    }
  }
  EXPECT_GE(static_cast<double>(hits), 0.9 * static_cast<double>(truth.size())) << bpm;
}

INSTANTIATE_TEST_SUITE_P(Clicks, TempoSweep, ::testing::Values(90.0, 100.0, 120.0, 128.0, 140.0));

TEST(BeatTracker, SilenceHasNoBeats) {
  OnsetEnvelope env;
  env.hop_s = 512.0 / 22050.0;
  env.values.assign(800, 0.0f);
  try {
    detect_beats(env, {60.0, 200.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoBeats);
  }
}

TEST(BeatTracker, BadRangeRejected) {
  try {
    detect_beats(click_envelope(120.0, 5.0), {200.0, 60.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

}  // namespace
}  // namespace mvgen
