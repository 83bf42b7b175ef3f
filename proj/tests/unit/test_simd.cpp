/// @file test_simd.cpp
/// @brief Every compiled-in kernel table against the scalar reference.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mvgen/simd/kernels.h"

namespace mvgen::simd {
namespace {

std::vector<float> random_vector(std::size_t n, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Sizes straddle vector widths and unrolled tails.
const std::size_t kSizes[] = {0, 1, 3, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 64, 65, 257, 1025, 4099};

TEST(SimdKernels, ScalarIsAlwaysAvailableAndFirst) {
  const auto tables = available_kernels();
  ASSERT_FALSE(tables.empty());
  EXPECT_EQ(tables.front(), &scalar_kernels());
  EXPECT_EQ(scalar_kernels().name, "scalar");
}

TEST(SimdKernels, ActiveTableIsOneOfTheAvailable) {
  const auto tables = available_kernels();
  bool found = false;
  for (const auto* t : tables) found = found || t == &active_kernels();
  EXPECT_TRUE(found);
}

TEST(SimdKernels, ScalarDotMatchesDoubleOracle) {
  for (std::size_t n : kSizes) {
    const auto a = random_vector(n, 11 + n);
    const auto b = random_vector(n, 97 + n);
    double expect = 0.0;
    for (std::size_t i = 0; i < n; ++i) expect += static_cast<double>(a[i]) * b[i];
    EXPECT_NEAR(scalar_kernels().dot(a.data(), b.data(), n), expect, 1e-4 * (1.0 + std::sqrt(double(n)))) << n;
  }
}

class KernelEquivalence : public ::testing::TestWithParam<const KernelTable*> {};

TEST_P(KernelEquivalence, Reductions) {
  const KernelTable& k = *GetParam();
  const KernelTable& s = scalar_kernels();
  for (std::size_t n : kSizes) {
    const auto a = random_vector(n, 3 * n + 1);
    const auto b = random_vector(n, 5 * n + 2);
    const float tol = 1e-5f * static_cast<float>(n + 1);
    EXPECT_NEAR(k.dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n), tol) << k.name << " n=" << n;
    EXPECT_NEAR(k.sum_squares(a.data(), n), s.sum_squares(a.data(), n), tol) << k.name << " n=" << n;
    EXPECT_NEAR(k.rectified_diff_energy(a.data(), b.data(), n), s.rectified_diff_energy(a.data(), b.data(), n), tol)
        << k.name << " n=" << n;
  }
}

TEST_P(KernelEquivalence, ElementwiseKernels) {
  const KernelTable& k = *GetParam();
  const KernelTable& s = scalar_kernels();
  for (std::size_t n : kSizes) {
    const auto in = random_vector(n, 7 * n + 3);
    const auto win = random_vector(n, 9 * n + 4, 0.0f, 1.0f);
    std::vector<float> o1(n), o2(n);
    k.apply_window(in.data(), win.data(), o1.data(), n);
    s.apply_window(in.data(), win.data(), o2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_FLOAT_EQ(o1[i], o2[i]);

    const auto cplx = random_vector(2 * n, 13 * n + 5);
    std::vector<float> m1(n), m2(n);
    k.magnitudes(cplx.data(), 0.5f, m1.data(), n);
    s.magnitudes(cplx.data(), 0.5f, m2.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(m1[i], m2[i], 1e-6f * (1.0f + m2[i])) << k.name << " n=" << n << " i=" << i;
    }
  }
}

TEST_P(KernelEquivalence, RectifiedDiffIgnoresDecreases) {
  const KernelTable& k = *GetParam();
  const std::vector<float> prev = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<float> cur = {0, 3, 3, 2, 7, 6, 8, 8, 8, 12};
  // Increases: 1, 2, 1, 2 -> 1 + 4 + 1 + 4.
  EXPECT_FLOAT_EQ(k.rectified_diff_energy(cur.data(), prev.data(), cur.size()), 10.0f);
}

INSTANTIATE_TEST_SUITE_P(AllTables, KernelEquivalence, ::testing::ValuesIn(available_kernels()),
                         [](const auto& info) { return std::string(info.param->name); });

}  // namespace
}  // namespace mvgen::simd
