#pragma once

/// @file audio_buffer.h
/// @brief Canonical mono PCM representation shared by every analysis stage.

#include <memory>
#include <span>
#include <vector>

namespace mvgen {

/// Half-open time interval in seconds, end_s > start_s >= 0.
struct TimeSpan {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }

  /// Throws InvalidArgument on a non-finite, negative or inverted span.
  static TimeSpan checked(double start_s, double end_s);
};

/// Immutable mono buffer. Copies share sample storage.
class AudioBuffer {
 public:
  AudioBuffer() = default;

  /// Throws InvalidArgument for sample_rate <= 0 or non-finite samples.
  AudioBuffer(std::vector<float> samples, int sample_rate);

  std::span<const float> samples() const {
    return storage_ ? std::span<const float>(storage_->data() + offset_, length_)
                    : std::span<const float>();
  }
  int sample_rate() const { return sample_rate_; }
  int channel_count() const { return 1; }
  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }
  double duration_s() const {
    return sample_rate_ > 0 ? static_cast<double>(length_) / sample_rate_ : 0.0;
  }

  /// Sub-buffer covering [span.start_s, span.end_s). Shares storage.
  /// Throws OutOfRange if the span leaves [0, duration_s].
  AudioBuffer slice(const TimeSpan& span) const;

 private:
  AudioBuffer(std::shared_ptr<const std::vector<float>> storage, std::size_t offset,
              std::size_t length, int sample_rate)
      : storage_(std::move(storage)), offset_(offset), length_(length), sample_rate_(sample_rate) {}

  std::shared_ptr<const std::vector<float>> storage_;
  std::size_t offset_ = 0;
  std::size_t length_ = 0;
  int sample_rate_ = 0;
};

/// Free-function form of AudioBuffer::slice.
inline AudioBuffer slice_span(const AudioBuffer& buffer, const TimeSpan& span) {
  return buffer.slice(span);
}

/// Sample index nearest to a time, clamped to [0, size].
std::size_t sample_index(const AudioBuffer& buffer, double time_s);

}  // namespace mvgen
