/// @file test_cli.cpp
/// @brief Command-line behaviour, run in-process.

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "mvgen/cli/cli_app.h"
#include "mvgen/run/run_manager.h"
#include "mvgen/util/files.h"
#include "test_support.h"

namespace mvgen {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    song_ = (tmp_ / "song.wav").string();
    testing::write_example_song(song_);
  }
  std::string path(const std::string& name) const { return (tmp_ / name).string(); }

  testing::TempDir tmp_;
  std::string song_;
};

TEST_F(CliTest, MockRunTwiceIsByteIdentical) {
  const std::vector<std::string> common = {"--mock", "--seed", "7", "--width", "32", "--height", "32"};
  auto args = [&](const std::string& out) {
    std::vector<std::string> a = {"run", song_, "-o", out};
    a.insert(a.end(), common.begin(), common.end());
    return a;
  };
  const CliResult a = cli(args(path("a")));
  ASSERT_EQ(a.code, 0) << a.err;
  const CliResult b = cli(args(path("b")));
  ASSERT_EQ(b.code, 0) << b.err;
  std::string diff;
  EXPECT_TRUE(testing::trees_equal(path("a"), path("b"), {".lock"}, &diff)) << diff;
  EXPECT_TRUE(load_manifest(path("a")).all_done());
}

TEST_F(CliTest, StagewiseCommandsMatchOneShotRun) {
  const std::vector<std::string> cfg = {"--mock", "--seed", "3", "--width", "32", "--height", "32"};
  std::vector<std::string> run = {"run", song_, "-o", path("whole")};
  run.insert(run.end(), cfg.begin(), cfg.end());
  ASSERT_EQ(cli(run).code, 0);

  std::vector<std::string> seg = {"segment", song_, "-o", path("steps")};
  seg.insert(seg.end(), cfg.begin(), cfg.end());
  const CliResult s = cli(seg);
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("EndOfTrack"), std::string::npos);
  for (const char* cmd : {"analyze", "script", "render", "assemble"}) {
    const CliResult r = cli({cmd, path("steps")});
    ASSERT_EQ(r.code, 0) << cmd << ": " << r.err;
  }
  std::string diff;
  EXPECT_TRUE(testing::trees_equal(path("whole"), path("steps"), {".lock"}, &diff)) << diff;
}

TEST_F(CliTest, SegmentJsonAndDefaultDirectory) {
  const CliResult r = cli({"segment", song_, "--mock", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_FALSE(doc["segments"]["segments"].empty());
  EXPECT_TRUE(fs::exists(path("song.mvgen/manifest.json")));
  // Running it again reuses the directory.
  EXPECT_EQ(cli({"segment", song_, "--mock", "--json"}).code, 0);
}

TEST_F(CliTest, LalmWithoutUrlsIsUsageErrorListingProblems) {
  const CliResult r = cli({"run", song_, "-o", path("x"), "--pipeline", "lalm", "--json"});
  EXPECT_EQ(r.code, kExitUsage);
  const json doc = json::parse(r.err);
  EXPECT_EQ(doc["error"]["code"], "ConfigInvalid");
  const auto& problems = doc["error"]["details"]["problems"];
  EXPECT_GE(problems.size(), 3u);
  EXPECT_NE(problems.dump().find("chat_audio_url"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("x")));
}

TEST_F(CliTest, PlainErrorsAreReadable) {
  const CliResult r = cli({"run", song_, "-o", path("x"), "--fps", "0", "--mock"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(r.err.rfind("error [ConfigInvalid]", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("  - "), std::string::npos);
}

TEST_F(CliTest, StageCommandRejectsArtifactAffectingOverride) {
  ASSERT_EQ(cli({"segment", song_, "-o", path("r"), "--mock"}).code, 0);
  const CliResult r = cli({"analyze", path("r"), "--seed", "99"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
}

TEST_F(CliTest, PipelineErrorsExitOne) {
  const CliResult missing = cli({"resume", path("nothing"), "--json"});
  EXPECT_EQ(missing.code, kExitFailure);
  EXPECT_EQ(json::parse(missing.err)["error"]["code"], "ManifestCorrupt");
  ASSERT_EQ(cli({"segment", song_, "-o", path("r"), "--mock"}).code, 0);
  const CliResult order = cli({"render", path("r"), "--json"});
  EXPECT_EQ(order.code, kExitFailure);
  EXPECT_EQ(json::parse(order.err)["error"]["code"], "StageOrder");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", song_}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_EQ(cli({"run", song_, "-o", path("y"), "--mock", "--stop-after", "never"}).code, kExitUsage);
}

}  // namespace
}  // namespace mvgen
