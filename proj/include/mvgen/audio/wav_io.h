#pragma once

/// @file wav_io.h
/// @brief RIFF/WAVE reading and writing (16-bit PCM and 32-bit float).

#include <filesystem>
#include <string>
#include <vector>

#include "mvgen/audio/audio_buffer.h"

namespace mvgen {

/// Interleaved samples as stored in the file, converted to float in [-1, 1].
struct WavData {
  std::vector<float> interleaved;
  int sample_rate = 0;
  int channels = 0;

  std::size_t frames() const { return channels > 0 ? interleaved.size() / channels : 0; }
};

WavData read_wav(const std::filesystem::path& path);
WavData parse_wav(std::string_view bytes);

enum class WavSampleFormat { Pcm16, Float32 };

std::string encode_wav(const WavData& data, WavSampleFormat format = WavSampleFormat::Pcm16);
void write_wav(const std::filesystem::path& path, const WavData& data,
               WavSampleFormat format = WavSampleFormat::Pcm16);

/// Mono 16-bit WAV of a buffer; the transport form used by the backend protocol.
std::string encode_wav(const AudioBuffer& buffer);

/// Decodes a WAV file, downmixes to mono by channel mean and resamples to
/// `analysis_rate` (windowed-sinc, see resample.h).
/// Errors: IoError (unreadable), UnsupportedFormat, ZeroLength.
AudioBuffer load_audio(const std::filesystem::path& path, int analysis_rate);

/// Same as load_audio for in-memory WAV bytes.
AudioBuffer decode_audio(std::string_view wav_bytes, int analysis_rate);

}  // namespace mvgen
