#pragma once

/// @file run_manager.h
/// @brief Run directories: manifest, stage execution, resume and locking.
///
/// Layout under a run directory:
///   manifest.json, input.wav
///   segments/segments.json, segments/segments.txt
///   analysis/track.txt, analysis/segment_<i>.txt (0-based), analysis/analysis.json
///   prompts/script_prompt.txt, prompts/story_prompt.txt (lalm)
///   scripts/story.txt (lalm), scripts/raw_response.txt, scripts/parsed_script.json,
///   scripts/validation.json
///   clips/scene_<n>/ (1-based)
///   output/final.manifest.json or output/final.mp4

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvgen/backends/protocol.h"
#include "mvgen/run/config.h"

namespace mvgen {

enum class Stage { Segment, Analyze, Script, Generate, Assemble };
inline constexpr std::size_t kStageCount = 5;
inline constexpr std::array<Stage, kStageCount> kAllStages = {Stage::Segment, Stage::Analyze, Stage::Script,
                                                              Stage::Generate, Stage::Assemble};
std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view name);

enum class StageStatus { Pending, Done, Failed };
std::string_view to_string(StageStatus status);

struct StageRecord {
  StageStatus status = StageStatus::Pending;
  std::vector<std::string> artifacts;  ///< paths relative to the run directory
  std::optional<nlohmann::json> error; ///< {"code", "message", ...} when Failed
};

struct RunManifest {
  std::string run_id;
  std::string created_at;
  RunConfig config;
  std::string config_hash;
  std::string input_name;    ///< file name of the original input
  std::string input_sha256;  ///< of input.wav
  std::array<StageRecord, kStageCount> stages;

  StageRecord& at(Stage s) { return stages[static_cast<std::size_t>(s)]; }
  const StageRecord& at(Stage s) const { return stages[static_cast<std::size_t>(s)]; }
  bool all_done() const;
};

nlohmann::json to_json(const RunManifest& manifest);
/// Errors: ManifestCorrupt.
RunManifest run_manifest_from_json(const nlohmann::json& doc);

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kInputFile = "input.wav";

/// Advisory exclusive lock on <run_dir>/.lock, held for the object's lifetime.
class RunLock {
 public:
  /// Errors: LockHeld when another process or object holds it.
  explicit RunLock(const std::filesystem::path& run_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  int fd_ = -1;
};

/// Creates the directory skeleton, copies the input to input.wav and writes a
/// manifest with every stage Pending. created_at honours SOURCE_DATE_EPOCH.
/// Errors: ConfigInvalid, RunDirNotEmpty, IoError, UnsupportedFormat, ZeroLength.
RunManifest init_run(const RunConfig& config, const std::filesystem::path& input_audio,
                     const std::filesystem::path& run_dir);

/// Errors: ManifestCorrupt (missing or unreadable manifest).
RunManifest load_manifest(const std::filesystem::path& run_dir);
void save_manifest(const std::filesystem::path& run_dir, const RunManifest& manifest);

/// Done stages form a prefix and their artifacts exist.
/// Errors: StageOrder, IntegrityError.
void check_integrity(const std::filesystem::path& run_dir, const RunManifest& manifest);

struct StageOptions {
  bool force = false;  ///< re-run a Done stage, invalidating it and all later stages
};

/// Runs one stage. Earlier stages must be Done (StageOrder). A Done stage is
/// left alone unless forced. On failure the stage is recorded as Failed with
/// the error and the error is rethrown.
RunManifest run_stage(const std::filesystem::path& run_dir, Stage stage, const BackendSet& backends,
                      const StageOptions& options = {});

/// Runs every non-Done stage in order, stopping after `stop_after` if given.
RunManifest run_pipeline(const std::filesystem::path& run_dir, const BackendSet& backends,
                         std::optional<Stage> stop_after = std::nullopt);

/// Integrity check, then run_pipeline. A fully Done run is left untouched.
RunManifest resume_run(const std::filesystem::path& run_dir, const BackendSet& backends);

/// Marks `from` and every later stage Pending. Artifacts stay on disk.
RunManifest invalidate_from(const std::filesystem::path& run_dir, Stage from);

/// Writes prompts/story_prompt.txt and scripts/story.txt for a lalm run
/// (existing story kept unless forced). Requires Segment Done. Stage statuses
/// are unchanged; the Script stage reuses the story. Returns the story text.
std::string write_story(const std::filesystem::path& run_dir, const BackendSet& backends, bool force = false);

}  // namespace mvgen
