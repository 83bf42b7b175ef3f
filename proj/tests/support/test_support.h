#pragma once

/// @file test_support.h
/// @brief Shared helpers for unit and acceptance tests.

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "mvgen/segmentation/types.h"
#include "mvgen/taxonomy/classifier.h"

namespace mvgen::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);

/// Scene lengths of the seven-scene example prompt.
inline constexpr std::array<double, 7> kExampleDurations = {5.49, 7.13, 7.87, 6.66, 6.2, 5.72, 4.94};
/// Cumulative ends of those scenes; the last is 44.01 s.
std::vector<double> example_section_ends();
/// Seven-segment plan with exactly the example durations.
SegmentPlan example_plan();
/// `count` back-to-back segments of `seconds` each.
SegmentPlan uniform_plan(std::size_t count, double seconds = 5.0);

/// Classification with the given label chosen, taken from the default taxonomy.
/// Throws when the category or label is unknown.
CategoryClassification chosen(const std::string& category_id, const std::string& label);

struct ExampleAnalyses {
  TrackAnalysis track;
  std::vector<SegmentAnalysis> segments;
};
/// Analyses whose rendered sentences reproduce the seven-scene example prompt.
ExampleAnalyses example_analyses();

/// Writes the 44.01 s sectioned demo song as mono 16-bit WAV.
void write_example_song(const std::filesystem::path& path, int sample_rate = 22050);

/// Byte-for-byte equality of two directory trees (names and contents),
/// ignoring entries whose file name is in `ignore`.
bool trees_equal(const std::filesystem::path& a, const std::filesystem::path& b,
                 const std::vector<std::string>& ignore = {}, std::string* first_difference = nullptr);

}  // namespace mvgen::testing
