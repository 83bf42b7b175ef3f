#include "mvgen/audio/audio_buffer.h"

#include <cmath>
#include <sstream>

#include "mvgen/util/error.h"

namespace mvgen {

TimeSpan TimeSpan::checked(double start_s, double end_s) {
  MVGEN_CHECK(std::isfinite(start_s) && std::isfinite(end_s), ErrorCode::InvalidArgument,
              "time span bounds must be finite");
  MVGEN_CHECK(start_s >= 0.0, ErrorCode::InvalidArgument, "time span starts before 0");
  MVGEN_CHECK(end_s > start_s, ErrorCode::InvalidArgument, "time span is empty or inverted");
  return TimeSpan{start_s, end_s};
}

AudioBuffer::AudioBuffer(std::vector<float> samples, int sample_rate) : sample_rate_(sample_rate) {
  MVGEN_CHECK(sample_rate > 0, ErrorCode::InvalidArgument, "sample rate must be positive");
  for (float s : samples) {
    MVGEN_CHECK(std::isfinite(s), ErrorCode::InvalidArgument, "audio contains non-finite samples");
  }
  length_ = samples.size();
  storage_ = std::make_shared<const std::vector<float>>(std::move(samples));
}

std::size_t sample_index(const AudioBuffer& buffer, double time_s) {
  double idx = std::round(time_s * buffer.sample_rate());
  if (idx <= 0.0) return 0;
  auto i = static_cast<std::size_t>(idx);
  return i > buffer.size() ? buffer.size() : i;
}

AudioBuffer AudioBuffer::slice(const TimeSpan& span) const {
  MVGEN_CHECK(std::isfinite(span.start_s) && std::isfinite(span.end_s), ErrorCode::InvalidArgument,
              "time span bounds must be finite");
  MVGEN_CHECK(span.end_s > span.start_s, ErrorCode::InvalidArgument, "inverted or empty time span");
  // Half a sample of slack absorbs rounding of durations stored at ms precision.
  const double slack = 0.5 / sample_rate_;
  if (span.start_s < 0.0 || span.end_s > duration_s() + slack) {
    std::ostringstream msg;
    msg << "span [" << span.start_s << ", " << span.end_s << "] exceeds buffer duration "
        << duration_s();
    throw Error(ErrorCode::OutOfRange, msg.str());
  }
  std::size_t begin = sample_index(*this, span.start_s);
  std::size_t end = sample_index(*this, span.end_s);
  return AudioBuffer(storage_, offset_ + begin, end - begin, sample_rate_);
}

}  // namespace mvgen
