#include "mvgen/audio/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "mvgen/audio/resample.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"

namespace mvgen {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<std::uint8_t>(p[0]) |
                                    (static_cast<std::uint8_t>(p[1]) << 8));
}

std::uint32_t read_u32(const char* p) {
  return static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[0])) |
         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[1])) << 8) |
         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[2])) << 16) |
         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[3])) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

WavData parse_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    throw Error(ErrorCode::UnsupportedFormat, "not a RIFF/WAVE file");
  }

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::string_view payload;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    std::string_view id = bytes.substr(pos, 4);
    std::uint32_t size = read_u32(bytes.data() + pos + 4);
    std::size_t body = pos + 8;
    std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
    if (id == "fmt ") {
      if (available < 16) throw Error(ErrorCode::UnsupportedFormat, "truncated fmt chunk");
      const char* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      if (format == kFormatExtensible && available >= 26) format = read_u16(f + 24);
      have_fmt = true;
    } else if (id == "data") {
      // Writers that stream sometimes leave the size as 0 or 0xFFFFFFFF.
      payload = bytes.substr(body, available);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt || !have_data) throw Error(ErrorCode::UnsupportedFormat, "missing fmt or data chunk");
  if (channels == 0 || rate == 0) throw Error(ErrorCode::UnsupportedFormat, "invalid channel count or rate");

  WavData out;
  out.sample_rate = static_cast<int>(rate);
  out.channels = channels;
  if (format == kFormatPcm && bits == 16) {
    std::size_t n = payload.size() / 2;
    n -= n % channels;
    out.interleaved.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto v = static_cast<std::int16_t>(read_u16(payload.data() + 2 * i));
      out.interleaved[i] = static_cast<float>(v) / 32768.0f;
    }
  } else if (format == kFormatFloat && bits == 32) {
    std::size_t n = payload.size() / 4;
    n -= n % channels;
    out.interleaved.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t raw = read_u32(payload.data() + 4 * i);
      float v;
      std::memcpy(&v, &raw, sizeof v);
      if (!std::isfinite(v)) throw Error(ErrorCode::UnsupportedFormat, "non-finite float sample");
      out.interleaved[i] = std::clamp(v, -1.0f, 1.0f);
    }
  } else {
    throw Error(ErrorCode::UnsupportedFormat,
                "unsupported WAV encoding (format " + std::to_string(format) + ", " +
                    std::to_string(bits) + " bit); expected 16-bit PCM or 32-bit float");
  }
  return out;
}

WavData read_wav(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::IoError, "cannot read audio file " + path.string());
  }
  return parse_wav(bytes);
}

std::string encode_wav(const WavData& data, WavSampleFormat format) {
  const bool is_float = format == WavSampleFormat::Float32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint16_t block = static_cast<std::uint16_t>(data.channels * bits / 8);
  const auto data_bytes = static_cast<std::uint32_t>(data.interleaved.size() * (bits / 8));

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, static_cast<std::uint16_t>(data.channels));
  put_u32(out, static_cast<std::uint32_t>(data.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(data.sample_rate) * block);
  put_u16(out, block);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_bytes);
  for (float s : data.interleaved) {
    if (is_float) {
      std::uint32_t raw;
      std::memcpy(&raw, &s, sizeof raw);
      put_u32(out, raw);
    } else {
      // Same scale as the reader, so decode followed by encode is lossless.
      const long q = std::clamp(std::lround(static_cast<double>(s) * 32768.0), -32768L, 32767L);
      auto v = static_cast<std::int16_t>(q);
      put_u16(out, static_cast<std::uint16_t>(v));
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const WavData& data, WavSampleFormat format) {
  write_file_atomic(path, encode_wav(data, format));
}

std::string encode_wav(const AudioBuffer& buffer) {
  WavData data;
  auto s = buffer.samples();
  data.interleaved.assign(s.begin(), s.end());
  data.sample_rate = buffer.sample_rate();
  data.channels = 1;
  return encode_wav(data, WavSampleFormat::Pcm16);
}

AudioBuffer decode_audio(std::string_view wav_bytes, int analysis_rate) {
  MVGEN_CHECK(analysis_rate > 0, ErrorCode::InvalidArgument, "analysis rate must be positive");
  WavData wav = parse_wav(wav_bytes);
  const std::size_t frames = wav.frames();
  if (frames == 0) throw Error(ErrorCode::ZeroLength, "audio contains no samples");

  std::vector<float> mono(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    float acc = 0.0f;
    for (int c = 0; c < wav.channels; ++c) acc += wav.interleaved[i * wav.channels + c];
    mono[i] = acc / static_cast<float>(wav.channels);
  }
  if (wav.sample_rate != analysis_rate) mono = resample(mono, wav.sample_rate, analysis_rate);
  return AudioBuffer(std::move(mono), analysis_rate);
}

AudioBuffer load_audio(const std::filesystem::path& path, int analysis_rate) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::IoError, "cannot read audio file " + path.string());
  }
  return decode_audio(bytes, analysis_rate);
}

}  // namespace mvgen
