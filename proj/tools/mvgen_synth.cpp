/// @file mvgen_synth.cpp
/// @brief Writes the synthetic demo song used by tests and examples.
///
/// The default section boundaries give seven sections lasting 5.49, 7.13,
/// 7.87, 6.66, 6.2, 5.72 and 4.94 s (44.01 s in total).

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvgen/audio/test_signals.h"
#include "mvgen/audio/wav_io.h"
#include "mvgen/util/error.h"

int main(int argc, char** argv) {
  CLI::App app{"Synthesize a sectioned demo song as 16-bit mono WAV"};
  std::string output;
  std::vector<double> ends = {5.49, 12.62, 20.49, 27.15, 33.35, 39.07, 44.01};
  double bpm = 120.0;
  int rate = 44100;
  std::uint64_t seed = 7;
  app.add_option("output", output, "Output WAV path")->required();
  app.add_option("--section-ends", ends, "Section end times in seconds");
  app.add_option("--bpm", bpm, "Click tempo");
  app.add_option("--rate", rate, "Sample rate");
  app.add_option("--seed", seed, "Noise seed");
  CLI11_PARSE(app, argc, argv);
  try {
    mvgen::WavData wav;
    wav.interleaved = mvgen::signals::sectioned_track(ends, bpm, rate, seed);
    wav.sample_rate = rate;
    wav.channels = 1;
    mvgen::write_wav(output, wav);
  } catch (const mvgen::Error& e) {
    std::cerr << "error [" << mvgen::error_code_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
