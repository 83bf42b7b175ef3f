#include "mvgen/audio/resample.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mvgen/util/error.h"

namespace mvgen {

namespace {

constexpr int kHalfTaps = 16;  // zero crossings on each side of the kernel centre

double blackman(double x) {
  // x in [-1, 1]
  const double pi = std::numbers::pi;
  return 0.42 + 0.5 * std::cos(pi * x) + 0.08 * std::cos(2.0 * pi * x);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<float> resample(std::span<const float> in, int from_rate, int to_rate) {
  MVGEN_CHECK(from_rate > 0 && to_rate > 0, ErrorCode::InvalidArgument, "sample rates must be positive");
  if (from_rate == to_rate) return {in.begin(), in.end()};

  const double ratio = static_cast<double>(to_rate) / from_rate;
  const auto out_len = static_cast<std::size_t>(std::llround(static_cast<double>(in.size()) * ratio));
  // Cutoff relative to the input rate; downsampling narrows the kernel band.
  const double cutoff = 0.95 * std::min(1.0, ratio);
  const double half_width = kHalfTaps / cutoff;  // in input samples

  // Kernel tabulated at kTableSteps points per input sample, linearly interpolated.
  constexpr int kTableSteps = 512;
  const auto table_len = static_cast<std::size_t>(std::ceil(half_width * kTableSteps)) + 2;
  std::vector<double> table(table_len);
  for (std::size_t k = 0; k < table_len; ++k) {
    const double u = static_cast<double>(k) / kTableSteps;
    table[k] = u >= half_width ? 0.0 : cutoff * sinc(cutoff * u) * blackman(u / half_width);
  }
  auto kernel = [&](double t) {
    const double pos = std::abs(t) * kTableSteps;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= table_len) return 0.0;
    const double frac = pos - static_cast<double>(k);
    return table[k] + frac * (table[k + 1] - table[k]);
  };

  std::vector<float> out(out_len);
  const auto n_in = static_cast<std::ptrdiff_t>(in.size());
  for (std::size_t j = 0; j < out_len; ++j) {
    const double centre = static_cast<double>(j) / ratio;
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil(centre - half_width));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor(centre + half_width));
    double acc = 0.0;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(lo, 0); i <= std::min(hi, n_in - 1); ++i) {
      acc += in[static_cast<std::size_t>(i)] * kernel(static_cast<double>(i) - centre);
    }
    out[j] = static_cast<float>(std::clamp(acc, -1.0, 1.0));
  }
  return out;
}

}  // namespace mvgen
