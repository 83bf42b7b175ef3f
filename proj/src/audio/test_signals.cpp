#include "mvgen/audio/test_signals.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mvgen::signals {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t sample_count(double duration_s, int sample_rate) {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

float uniform_pm1(std::mt19937_64& rng) {
  return static_cast<float>(static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0);
}

void add_partials(std::vector<float>& out, std::size_t begin, std::size_t end, double f0,
                  int brightness, float amplitude, int sample_rate) {
  const int first = brightness == 0 ? 1 : 5;
  const int last = brightness == 0 ? 6 : 14;
  double norm = 0.0;
  for (int k = first; k <= last; ++k) norm += brightness == 0 ? 1.0 / k : 1.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double v = 0.0;
    for (int k = first; k <= last; ++k) {
      const double a = brightness == 0 ? 1.0 / k : 1.0;
      v += a * std::sin(kTwoPi * f0 * k * t);
    }
    out[i] += static_cast<float>(amplitude * v / norm);
  }
}

}  // namespace

std::vector<float> sine(double freq_hz, double duration_s, int sample_rate, float amplitude) {
  std::vector<float> out(sample_count(duration_s, sample_rate));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = amplitude * static_cast<float>(std::sin(kTwoPi * freq_hz * static_cast<double>(i) / sample_rate));
  }
  return out;
}

std::vector<float> sine_step(double f1_hz, double f2_hz, double switch_s, double duration_s,
                             int sample_rate, float amplitude) {
  std::vector<float> out(sample_count(duration_s, sample_rate));
  double phase = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    out[i] = amplitude * static_cast<float>(std::sin(phase));
    phase += kTwoPi * (t < switch_s ? f1_hz : f2_hz) / sample_rate;
  }
  return out;
}

std::vector<float> silence_then_noise(double onset_s, double duration_s, int sample_rate,
                                      std::uint64_t seed, float amplitude) {
  std::vector<float> out(sample_count(duration_s, sample_rate));
  std::mt19937_64 rng(seed);
  const std::size_t start = sample_count(onset_s, sample_rate);
  for (std::size_t i = start; i < out.size(); ++i) out[i] = amplitude * uniform_pm1(rng);
  return out;
}

std::vector<double> click_times(double bpm, double duration_s) {
  std::vector<double> times;
  const double period = 60.0 / bpm;
  for (int k = 0;; ++k) {
    const double t = k * period;
    if (t >= duration_s) break;
    times.push_back(t);
  }
  return times;
}

std::vector<float> click_track(double bpm, double duration_s, int sample_rate, std::uint64_t seed,
                               float amplitude) {
  std::vector<float> out(sample_count(duration_s, sample_rate));
  std::mt19937_64 rng(seed);
  const double decay_s = 0.005;
  const auto burst = sample_count(0.03, sample_rate);
  for (double t : click_times(bpm, duration_s)) {
    const std::size_t start = sample_count(t, sample_rate);
    for (std::size_t j = 0; j < burst && start + j < out.size(); ++j) {
      const double env = std::exp(-static_cast<double>(j) / (decay_s * sample_rate));
      out[start + j] += amplitude * static_cast<float>(env) * uniform_pm1(rng);
    }
  }
  return out;
}

std::vector<float> drone(double fundamental_hz, double duration_s, int sample_rate, int brightness,
                         float amplitude) {
  std::vector<float> out(sample_count(duration_s, sample_rate), 0.0f);
  add_partials(out, 0, out.size(), fundamental_hz, brightness, amplitude, sample_rate);
  return out;
}

std::vector<float> timbre_switch_drone(double fundamental_hz, double switch_s, double duration_s,
                                       int sample_rate) {
  std::vector<float> out(sample_count(duration_s, sample_rate), 0.0f);
  const std::size_t cut = std::min(out.size(), sample_count(switch_s, sample_rate));
  add_partials(out, 0, cut, fundamental_hz, 0, 0.4f, sample_rate);
  add_partials(out, cut, out.size(), fundamental_hz, 1, 0.4f, sample_rate);
  return out;
}

std::vector<float> sectioned_track(const std::vector<double>& section_ends_s, double bpm,
                                   int sample_rate, std::uint64_t seed) {
  const double duration = section_ends_s.empty() ? 0.0 : section_ends_s.back();
  std::vector<float> out(sample_count(duration, sample_rate), 0.0f);
  static constexpr double kRoots[] = {110.0, 146.83, 130.81, 164.81, 98.0, 123.47, 174.61};
  double start = 0.0;
  for (std::size_t s = 0; s < section_ends_s.size(); ++s) {
    const std::size_t b = sample_count(start, sample_rate);
    const std::size_t e = std::min(out.size(), sample_count(section_ends_s[s], sample_rate));
    add_partials(out, b, e, kRoots[s % std::size(kRoots)], static_cast<int>(s % 2), 0.3f, sample_rate);
    start = section_ends_s[s];
  }
  auto clicks = click_track(bpm, duration, sample_rate, seed, 0.5f);
  for (std::size_t i = 0; i < out.size() && i < clicks.size(); ++i) {
    out[i] = std::clamp(out[i] + clicks[i], -1.0f, 1.0f);
  }
  return out;
}

std::vector<float> mix(const std::vector<float>& a, const std::vector<float>& b) {
  std::vector<float> out(std::min(a.size(), b.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

}  // namespace mvgen::signals
