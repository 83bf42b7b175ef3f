#pragma once

#include <span>
#include <vector>

namespace mvgen {

/// Band-limited resampling with a Blackman-windowed sinc kernel.
/// The cutoff sits at 0.95 of the lower Nyquist frequency. Output length is
/// round(in.size() * to_rate / from_rate).
std::vector<float> resample(std::span<const float> in, int from_rate, int to_rate);

}  // namespace mvgen
