/// @file test_audio.cpp
/// @brief WAV decoding, downmix, resampling and slicing.

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "mvgen/audio/resample.h"
#include "mvgen/audio/test_signals.h"
#include "mvgen/audio/wav_io.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"
#include "test_support.h"

namespace mvgen {
namespace {

using testing::TempDir;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mvgen::Error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(WavIo, StereoSineDownmixedAndResampled) {
  TempDir tmp;
  WavData wav;
  wav.sample_rate = 44100;
  wav.channels = 2;
  const auto mono = signals::sine(440.0, 1.0, 44100);
  for (float s : mono) {
    wav.interleaved.push_back(s);
    wav.interleaved.push_back(s);
  }
  write_wav(tmp / "s.wav", wav);
  const AudioBuffer b = load_audio(tmp / "s.wav", 22050);
  EXPECT_EQ(b.sample_rate(), 22050);
  EXPECT_EQ(b.channel_count(), 1);
  EXPECT_EQ(b.size(), 22050u);
  EXPECT_DOUBLE_EQ(b.duration_s(), 1.0);
}

TEST(WavIo, DownmixIsChannelMean) {
  WavData wav;
  wav.sample_rate = 22050;
  wav.channels = 2;
  for (int i = 0; i < 1000; ++i) {
    wav.interleaved.push_back(0.5f);
    wav.interleaved.push_back(-0.25f);
  }
  const AudioBuffer b = decode_audio(encode_wav(wav, WavSampleFormat::Float32), 22050);
  for (float s : b.samples()) EXPECT_FLOAT_EQ(s, 0.125f);
}

TEST(WavIo, ZeroLengthRejected) {
  WavData wav;
  wav.sample_rate = 22050;
  wav.channels = 1;
  const std::string bytes = encode_wav(wav);
  EXPECT_EQ(code_of([&] { decode_audio(bytes, 22050); }), ErrorCode::ZeroLength);
}

TEST(WavIo, UnreadableAndUnsupported) {
  TempDir tmp;
  EXPECT_EQ(code_of([&] { load_audio(tmp / "missing.wav", 22050); }), ErrorCode::IoError);
  write_file_atomic(tmp / "junk.wav", "RIFF\x04\0\0\0WAVEjunk");
  EXPECT_EQ(code_of([&] { load_audio(tmp / "junk.wav", 22050); }), ErrorCode::UnsupportedFormat);
}

TEST(WavIo, Pcm16RoundTripIsLossless) {
  WavData wav;
  wav.sample_rate = 8000;
  wav.channels = 1;
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(-32768, 32767);
  for (int i = 0; i < 5000; ++i) wav.interleaved.push_back(static_cast<float>(d(rng)) / 32768.0f);
  const std::string once = encode_wav(wav);
  const WavData back = parse_wav(once);
  EXPECT_EQ(encode_wav(back), once);
  EXPECT_EQ(back.interleaved, wav.interleaved);
}

TEST(WavIo, Float32RoundTrip) {
  WavData wav;
  wav.sample_rate = 16000;
  wav.channels = 3;
  for (int i = 0; i < 300; ++i) wav.interleaved.push_back(std::sin(0.01f * i));
  const WavData back = parse_wav(encode_wav(wav, WavSampleFormat::Float32));
  EXPECT_EQ(back.channels, 3);
  EXPECT_EQ(back.sample_rate, 16000);
  EXPECT_EQ(back.interleaved, wav.interleaved);
}

TEST(WavIo, ExampleSongLastsExpectedDuration) {
  TempDir tmp;
  testing::write_example_song(tmp / "song.wav", 44100);
  const AudioBuffer b = load_audio(tmp / "song.wav", 22050);
  EXPECT_NEAR(b.duration_s(), 44.01, 1.0 / 22050);
}

TEST(Resample, PreservesSineAmplitudeAndFrequency) {
  const auto in = signals::sine(1000.0, 0.5, 48000, 0.5f);
  const auto out = resample(in, 48000, 22050);
  ASSERT_EQ(out.size(), static_cast<std::size_t>(std::lround(in.size() * 22050.0 / 48000.0)));
  // Compare against the analytic sine away from the edges.
  double err = 0.0;
  for (std::size_t i = 500; i + 500 < out.size(); ++i) {
    const double t = static_cast<double>(i) / 22050.0;
    err = std::max(err, std::abs(out[i] - 0.5 * std::sin(2 * std::numbers::pi * 1000.0 * t)));
  }
  EXPECT_LT(err, 0.01);
}

TEST(Resample, RemovesContentAboveTargetNyquist) {
  const auto in = signals::sine(15000.0, 0.5, 44100, 0.5f);
  const auto out = resample(in, 44100, 22050);
  double rms = 0.0;
  for (std::size_t i = 500; i + 500 < out.size(); ++i) rms += out[i] * out[i];
  rms = std::sqrt(rms / static_cast<double>(out.size() - 1000));
  EXPECT_LT(rms, 0.01);
}

TEST(Resample, IdentityWhenRatesMatch) {
  const auto in = signals::sine(300.0, 0.1, 22050);
  EXPECT_EQ(resample(in, 22050, 22050), in);
}

class SliceTest : public ::testing::Test {
 protected:
  AudioBuffer buffer{signals::sectioned_track(testing::example_section_ends(), 120.0, 22050), 22050};
};

TEST_F(SliceTest, FirstExampleScene) {
  const AudioBuffer s = slice_span(buffer, TimeSpan{0.0, 5.49});
  EXPECT_NEAR(s.duration_s(), 5.49, 1.0 / 22050);
  EXPECT_EQ(s.sample_rate(), 22050);
}

TEST_F(SliceTest, FullSpanIsIdentity) {
  const AudioBuffer s = slice_span(buffer, TimeSpan{0.0, buffer.duration_s()});
  ASSERT_EQ(s.size(), buffer.size());
  EXPECT_TRUE(std::equal(s.samples().begin(), s.samples().end(), buffer.samples().begin()));
}

TEST_F(SliceTest, OutOfRangeAndInverted) {
  EXPECT_EQ(code_of([&] { slice_span(buffer, TimeSpan{40.0, 50.0}); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { slice_span(buffer, TimeSpan{3.0, 2.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { TimeSpan::checked(1.0, 1.0); }), ErrorCode::InvalidArgument);
}

// Property: slicing any partition and concatenating reproduces the buffer.
TEST_F(SliceTest, PartitionConcatenationReproducesBuffer) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_real_distribution<double> u(0.05, 3.0);
    std::vector<double> cuts;
    for (double t = u(rng); t < buffer.duration_s(); t += u(rng)) cuts.push_back(t);
    std::vector<float> joined;
    double start = 0.0;
    cuts.push_back(buffer.duration_s());
    for (double end : cuts) {
      const AudioBuffer s = slice_span(buffer, TimeSpan{start, end});
      joined.insert(joined.end(), s.samples().begin(), s.samples().end());
      start = end;
    }
    const auto diff = static_cast<long>(joined.size()) - static_cast<long>(buffer.size());
    EXPECT_LE(std::abs(diff), static_cast<long>(cuts.size()));
    if (diff == 0) {
      EXPECT_TRUE(std::equal(joined.begin(), joined.end(), buffer.samples().begin()));
    }
  }
}

}  // namespace
}  // namespace mvgen
