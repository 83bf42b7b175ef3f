/// @file test_parser.cpp
/// @brief Script extraction, validation and robustness.

#include <gtest/gtest.h>

#include <random>

#include "mvgen/scripting/script_parser.h"
#include "mvgen/util/error.h"
#include "test_support.h"

namespace mvgen {
namespace {

ErrorCode parse_error(std::string_view raw, std::size_t expected) {
  try {
    parse_script(raw, expected);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parse succeeded";
  return ErrorCode::InvalidArgument;
}

TEST(Parser, ExampleResponse) {
  const std::string raw = testing::read_fixture("example_response.txt");
  const VideoScript s = parse_script(raw, 7);
  ASSERT_EQ(s.scenes.size(), 7u);
  EXPECT_EQ(s.scenes[0].description.rfind("A group of four people", 0), 0u);
  EXPECT_EQ(s.scenes[6].number, 7);
  EXPECT_EQ(s.raw_response, raw);
  for (const auto& scene : s.scenes) {
    EXPECT_EQ(scene.description.find("END SCRIPT"), std::string::npos);
    EXPECT_EQ(scene.description.find("SCENE"), std::string::npos);
  }
  const ValidationReport r = validate_script(s, testing::example_plan());
  EXPECT_TRUE(r.hard.empty());
  EXPECT_FALSE(r.soft.empty());  // the example scenes run to several sentences
}

TEST(Parser, MarkerInsideReasoningIsIgnored) {
  const std::string raw =
      "<think>I will write BEGIN SCRIPT and then SCENE 1: something</think>\nBEGIN SCRIPT\nSCENE 1: A.\nSCENE 2: B.\n";
  const VideoScript s = parse_script(raw, 2);
  EXPECT_EQ(s.scenes[0].description, "A.");
  EXPECT_EQ(s.scenes[1].description, "B.");
}

TEST(Parser, SceneTextMaySpanLines) {
  const VideoScript s = parse_script("BEGIN SCRIPT\nSCENE 1:\nA fox\nruns.\n\nSCENE 2: Rain.", 2);
  EXPECT_EQ(s.scenes[0].description, "A fox\nruns.");
}

TEST(Parser, TypedErrors) {
  EXPECT_EQ(parse_error("SCENE 1: a", 1), ErrorCode::MissingBeginMarker);
  EXPECT_EQ(parse_error("BEGIN SCRIPT\nnothing here", 1), ErrorCode::EmptyScript);
  EXPECT_EQ(parse_error("BEGIN SCRIPT\nSCENE 1: a\nSCENE 2: b", 3), ErrorCode::SceneCountMismatch);
  EXPECT_EQ(parse_error("BEGIN SCRIPT\nSCENE 1: a\nSCENE 3: b", 2), ErrorCode::NonContiguousNumbering);
  EXPECT_EQ(parse_error("BEGIN SCRIPT\nSCENE 2: a\nSCENE 1: b", 2), ErrorCode::NonContiguousNumbering);
}

TEST(Parser, CountMismatchReportsNumbers) {
  try {
    parse_script("BEGIN SCRIPT\nSCENE 1: a\nSCENE 2: b", 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.details().at("found"), 2);
    EXPECT_EQ(e.details().at("expected"), 5);
  }
}

TEST(Parser, SerializeRoundTrip) {
  const VideoScript s = parse_script(testing::read_fixture("example_response.txt"), 7, ScriptSource::LalmPipeline);
  const VideoScript again = parse_script(serialize_script(s), 7, ScriptSource::LalmPipeline);
  ASSERT_EQ(again.scenes.size(), s.scenes.size());
  for (std::size_t i = 0; i < s.scenes.size(); ++i) EXPECT_EQ(again.scenes[i].description, s.scenes[i].description);
  const VideoScript fromjson = video_script_from_json(to_json(s));
  EXPECT_EQ(fromjson.source, ScriptSource::LalmPipeline);
  EXPECT_EQ(fromjson.scenes.size(), 7u);
}

TEST(Validation, FindingsByKind) {
  VideoScript s;
  s.scenes = {{1, "One sentence."}, {2, ""}, {3, "First. Second."}, {4, std::string(300, 'w')}};
  SegmentPlan plan = testing::example_plan();
  const ValidationReport r = validate_script(s, plan);
  bool count = false, empty = false, multi = false;
  for (const auto& f : r.hard) {
    count = count || f.kind == FindingKind::CountMismatch;
    empty = empty || (f.kind == FindingKind::EmptyDescription && f.scene_number == 2);
  }
  for (const auto& f : r.soft) multi = multi || (f.kind == FindingKind::MultiSentence && f.scene_number == 3);
  EXPECT_TRUE(count);
  EXPECT_TRUE(empty);
  EXPECT_TRUE(multi);
  EXPECT_FALSE(r.ok());
}

TEST(Validation, SentenceCounting) {
  EXPECT_EQ(count_sentences("One."), 1u);
  EXPECT_EQ(count_sentences("One. Two!"), 2u);
  EXPECT_EQ(count_sentences("No period"), 1u);
  EXPECT_EQ(count_sentences("Dr.Who waits... then runs."), 2u);
  EXPECT_EQ(count_sentences(""), 0u);
}

// Property: random mutations never escape as anything but a script or a typed error.
TEST(Parser, MutationFuzzSmall) {
  const std::string base = testing::read_fixture("example_response.txt");
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    std::string m = base;
    const int ops = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < ops && !m.empty(); ++k) {
      const std::size_t pos = rng() % m.size();
      switch (rng() % 4) {
        case 0: m.erase(pos, 1 + rng() % 40); break;
        case 1: m.insert(pos, "SCENE " + std::to_string(rng() % 12) + ":"); break;
        case 2: m.resize(pos); break;
        default: m[pos] = static_cast<char>(rng() % 256); break;
      }
    }
    try {
      const VideoScript s = parse_script(m, 7);
      EXPECT_EQ(s.scenes.size(), 7u);
    } catch (const Error&) {
    }
  }
}

}  // namespace
}  // namespace mvgen
