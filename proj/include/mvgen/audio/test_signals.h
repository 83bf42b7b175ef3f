#pragma once

/// @file test_signals.h
/// @brief Deterministic synthetic signals with known structure (switch
/// times, click times) used as ground truth for the analysis stages.

#include <cstdint>
#include <vector>

#include "mvgen/audio/audio_buffer.h"

namespace mvgen::signals {

std::vector<float> sine(double freq_hz, double duration_s, int sample_rate, float amplitude = 0.5f);

/// Sine at f1 until switch_s, then f2 (phase continuous).
std::vector<float> sine_step(double f1_hz, double f2_hz, double switch_s, double duration_s,
                             int sample_rate, float amplitude = 0.5f);

/// Silence until onset_s, then uniform white noise.
std::vector<float> silence_then_noise(double onset_s, double duration_s, int sample_rate,
                                      std::uint64_t seed, float amplitude = 0.3f);

/// Exponentially decaying noise bursts at k * 60 / bpm seconds, k >= 0.
std::vector<float> click_track(double bpm, double duration_s, int sample_rate,
                               std::uint64_t seed = 1, float amplitude = 0.8f);

/// Click times matching click_track.
std::vector<double> click_times(double bpm, double duration_s);

/// Harmonic drone on `fundamental_hz` with a stable spectrum. `brightness`
/// selects the partial set: 0 gives partials 1..6 with 1/k roll-off, 1 gives
/// partials 5..14 with a flat envelope.
std::vector<float> drone(double fundamental_hz, double duration_s, int sample_rate, int brightness = 0,
                         float amplitude = 0.4f);

/// Drone whose timbre switches from brightness 0 to 1 at switch_s.
std::vector<float> timbre_switch_drone(double fundamental_hz, double switch_s, double duration_s,
                                       int sample_rate);

/// Multi-section demo track: a click pulse at `bpm` over a drone whose
/// fundamental and timbre change at each boundary in `section_ends_s`.
std::vector<float> sectioned_track(const std::vector<double>& section_ends_s, double bpm,
                                   int sample_rate, std::uint64_t seed = 7);

/// Sum of sequences, truncated to the shorter one.
std::vector<float> mix(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace mvgen::signals
