/// @file test_generation.cpp
/// @brief Clip generation, persistence and conforming.

#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "mvgen/backends/mock_backends.h"
#include "mvgen/generation/clip_generator.h"
#include "mvgen/generation/image_io.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"
#include "test_support.h"

namespace mvgen {
namespace {

namespace fs = std::filesystem;

Frame solid(int w, int h, std::uint8_t v) { return Frame{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w * h * 3), v)}; }

VideoScript script_of(std::size_t n) {
  VideoScript s;
  for (std::size_t i = 0; i < n; ++i) s.scenes.push_back({static_cast<int>(i + 1), "Scene text " + std::to_string(i + 1) + "."});
  return s;
}

GenerationSettings small_settings() {
  GenerationSettings g;
  g.width = 16;
  g.height = 8;
  g.fps = 12.0;
  g.run_seed = 100;
  return g;
}

struct CountingVideo : PatternVideoBackend {
  using PatternVideoBackend::PatternVideoBackend;
  std::atomic<int> calls{0};
  VideoPayload generate(const VideoRequest& r) override {
    ++calls;
    return PatternVideoBackend::generate(r);
  }
};

TEST(Png, RoundTripAndDeterministicBytes) {
  Frame f{5, 3, {}};
  std::mt19937 rng(1);
  for (int i = 0; i < 5 * 3 * 3; ++i) f.rgb.push_back(static_cast<std::uint8_t>(rng()));
  const std::string a = encode_png(f);
  EXPECT_EQ(a, encode_png(f));
  const Frame back = decode_png(a);
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 3);
  EXPECT_EQ(back.rgb, f.rgb);
  EXPECT_THROW(decode_png("not a png"), Error);
}

TEST(Conform, TargetFrameCount) {
  EXPECT_EQ(target_frame_count(2.0, 12.0), 24u);
  EXPECT_EQ(target_frame_count(6.2, 12.0), 74u);
  EXPECT_EQ(target_frame_count(0.01, 12.0), 1u);
}

TEST(Conform, TrimAndHold) {
  for (ConformPolicy p : {ConformPolicy::TrimEnd, ConformPolicy::HoldLastFrame}) {
    std::vector<Frame> frames = {solid(2, 2, 1), solid(2, 2, 2), solid(2, 2, 3)};
    conform_frames(frames, 2, p);
    ASSERT_EQ(frames.size(), 2u);
    EXPECT_EQ(frames[1].rgb[0], 2);
    conform_frames(frames, 5, p);
    ASSERT_EQ(frames.size(), 5u);
    EXPECT_EQ(frames[4].rgb[0], 2);
    std::vector<Frame> none;
    EXPECT_THROW(conform_frames(none, 3, p), Error);
  }
}

TEST(Payload, Checks) {
  const VideoRequest req{"x", 1.0, 2, 2, 12.0, 0};
  VideoPayload ok{12.0, 2, 2, {solid(2, 2, 0)}};
  EXPECT_NO_THROW(check_payload(ok, req));
  VideoPayload empty{12.0, 2, 2, {}};
  VideoPayload bad_fps{0.0, 2, 2, {solid(2, 2, 0)}};
  VideoPayload bad_size{12.0, 2, 2, {solid(3, 2, 0)}};
  for (const auto* p : {&empty, &bad_fps, &bad_size}) {
    try {
      check_payload(*p, req);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedClip);
    }
  }
}

TEST(Clip, PersistLoadAndConform) {
  testing::TempDir tmp;
  PatternVideoBackend video(5);
  const ClipArtifact raw = generate_clip(ClipRequest{3, "a fox", 1.0, 16, 8, 12.0, 7}, video, tmp.path());
  EXPECT_EQ(raw.frame_count, 17u);
  EXPECT_EQ(raw.dir, scene_dir(tmp.path(), 3));
  EXPECT_TRUE(fs::exists(raw.frame_path(16)));
  const ClipArtifact loaded = load_clip(raw.dir);
  EXPECT_EQ(to_json(loaded), to_json(raw));
  const ClipArtifact conformed = conform_clip(raw, 1.0, ConformPolicy::TrimEnd);
  EXPECT_EQ(conformed.frame_count, 12u);
  EXPECT_FALSE(fs::exists(conformed.frame_path(12)));
  const ClipArtifact held = conform_clip(conformed, 1.5, ConformPolicy::HoldLastFrame);
  EXPECT_EQ(held.frame_count, 18u);
  EXPECT_EQ(read_file(held.frame_path(17)), read_file(held.frame_path(11)));
}

TEST(Clip, LoadErrors) {
  testing::TempDir tmp;
  try {
    load_clip(tmp / "scene_1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingClip);
  }
  PatternVideoBackend video;
  const ClipArtifact c = generate_clip(ClipRequest{1, "x", 0.5, 8, 8, 12.0, 0}, video, tmp.path());
  fs::remove(c.frame_path(2));
  EXPECT_THROW(load_clip(c.dir), Error);
}

TEST(GenerateAll, DurationsMatchSegments) {
  testing::TempDir tmp;
  const SegmentPlan plan = testing::example_plan();
  PatternVideoBackend video(4);  // overshoots every request
  GenerationSettings g = small_settings();
  g.max_concurrency = 3;
  const auto clips = generate_all(script_of(7), plan, "", video, g, tmp.path());
  ASSERT_EQ(clips.size(), 7u);
  double total = 0.0;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    EXPECT_EQ(clips[i].scene_number, static_cast<int>(i + 1));
    EXPECT_EQ(clips[i].seed, 100u + i + 1);
    EXPECT_LE(std::abs(clips[i].duration_s() - plan.segments[i].duration()), 0.5 / g.fps + 1e-9);
    total += clips[i].duration_s();
  }
  EXPECT_LE(std::abs(total - 44.01), 7.0 / g.fps);
}

TEST(GenerateAll, ReusesMatchingClipsAndIsDeterministic) {
  testing::TempDir a, b;
  const SegmentPlan plan = testing::uniform_plan(3, 1.0);
  CountingVideo video;
  generate_all(script_of(3), plan, "", video, small_settings(), a.path());
  EXPECT_EQ(video.calls.load(), 3);
  generate_all(script_of(3), plan, "", video, small_settings(), a.path());
  EXPECT_EQ(video.calls.load(), 3);
  VideoScript changed = script_of(3);
  changed.scenes[1].description = "Different.";
  generate_all(changed, plan, "", video, small_settings(), a.path());
  EXPECT_EQ(video.calls.load(), 4);
  generate_all(changed, plan, "", video, small_settings(), b.path());
  EXPECT_TRUE(testing::trees_equal(a.path(), b.path()));
}

TEST(GenerateAll, ReportsEveryFailedScene) {
  struct Flaky : PatternVideoBackend {
    VideoPayload generate(const VideoRequest& r) override {
      if (r.prompt.find("2.") != std::string::npos || r.prompt.find("3.") != std::string::npos) {
        throw Error(ErrorCode::BackendTransport, "down");
      }
      return PatternVideoBackend::generate(r);
    }
  } video;
  testing::TempDir tmp;
  try {
    generate_all(script_of(4), testing::uniform_plan(4, 1.0), "", video, small_settings(), tmp.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GenerationFailed);
    ASSERT_EQ(e.details().at("failed").size(), 2u);
    EXPECT_EQ(e.details()["failed"][0]["scene"], 2);
    EXPECT_EQ(e.details()["failed"][1]["scene"], 3);
  }
  EXPECT_TRUE(fs::exists(scene_dir(tmp.path(), 1) / "clip.json"));
  EXPECT_TRUE(fs::exists(scene_dir(tmp.path(), 4) / "clip.json"));
  EXPECT_FALSE(fs::exists(scene_dir(tmp.path(), 2)));
}

TEST(GenerateAll, CountMismatchRejected) {
  testing::TempDir tmp;
  PatternVideoBackend video;
  EXPECT_THROW(generate_all(script_of(2), testing::uniform_plan(3), "", video, small_settings(), tmp.path()), Error);
  EXPECT_THROW(generate_all(VideoScript{}, testing::uniform_plan(3), "", video, small_settings(), tmp.path()), Error);
}

TEST(ScenePrompt, StyleAppended) {
  const Scene s{1, "A fox runs."};
  EXPECT_EQ(scene_prompt(s, ""), "A fox runs.");
  EXPECT_EQ(scene_prompt(s, "Visual style is Noir.").rfind("A fox runs.", 0), 0u);
  EXPECT_NE(scene_prompt(s, "Visual style is Noir.").find("Noir"), std::string::npos);
}

}  // namespace
}  // namespace mvgen
