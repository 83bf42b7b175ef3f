#pragma once

/// @file clip_generator.h
/// @brief Scene clips: request, persist, and conform to segment lengths.
///
/// A clip lives in clips/scene_<n>/ as frame_00000.png, frame_00001.png, ...
/// plus clip.json. Directories are written under a temporary name and
/// renamed into place, so a scene directory is either complete or absent.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvgen/backends/protocol.h"
#include "mvgen/scripting/script_parser.h"
#include "mvgen/segmentation/types.h"

namespace mvgen {

/// Names the expected mismatch: TrimEnd for backends that overshoot,
/// HoldLastFrame for ones that undershoot. Either way the result must hit the
/// target, so a long clip is trimmed and a short one padded with its last frame.
enum class ConformPolicy { TrimEnd, HoldLastFrame };
std::string_view to_string(ConformPolicy policy);
ConformPolicy conform_policy_from_string(std::string_view name);

struct ClipRequest {
  int scene_number = 1;
  std::string prompt_text;
  double duration_s = 0.0;
  int width = 512;
  int height = 512;
  double fps = 12.0;
  std::uint64_t seed = 0;
};

struct ClipArtifact {
  int scene_number = 0;
  std::size_t frame_count = 0;
  double fps = 0.0;
  int width = 0;
  int height = 0;
  std::filesystem::path dir;
  std::string frame_pattern = "frame_%05d.png";
  std::string prompt_sha256;
  std::uint64_t seed = 0;

  double duration_s() const { return fps > 0.0 ? static_cast<double>(frame_count) / fps : 0.0; }
  std::filesystem::path frame_path(std::size_t i) const;
};

/// max(1, round(duration_s * fps)).
std::size_t target_frame_count(double duration_s, double fps);

/// clips_dir / "scene_<n>".
std::filesystem::path scene_dir(const std::filesystem::path& clips_dir, int scene_number);

/// Checks a backend payload: at least one frame, positive fps, every frame
/// matching the declared size. Errors: MalformedClip.
void check_payload(const VideoPayload& payload, const VideoRequest& request);

/// In-memory conform. Errors: EmptyClip.
void conform_frames(std::vector<Frame>& frames, std::size_t target, ConformPolicy policy);

/// Requests the clip and persists it as returned (frame count chosen by the
/// backend). Errors: backend errors, MalformedClip.
ClipArtifact generate_clip(const ClipRequest& request, VideoBackend& backend, const std::filesystem::path& clips_dir);

/// Conforms a persisted clip to round(target_duration_s * fps) frames by
/// dropping tail frames or repeating the last one. Errors: EmptyClip.
ClipArtifact conform_clip(const ClipArtifact& clip, double target_duration_s, ConformPolicy policy);

nlohmann::json to_json(const ClipArtifact& clip);
/// Reads clip.json and checks that every frame file exists.
/// Errors: MissingClip, MalformedClip.
ClipArtifact load_clip(const std::filesystem::path& dir);

struct GenerationSettings {
  int width = 512;
  int height = 512;
  double fps = 12.0;
  ConformPolicy policy = ConformPolicy::TrimEnd;
  std::uint64_t run_seed = 0;
  int max_concurrency = 1;
};

/// Prompt for one scene: the description, then the style text when present.
std::string scene_prompt(const Scene& scene, std::string_view style_text);

/// One conformed clip per scene, in scene order. Scene n uses seed
/// run_seed + n and lasts exactly as long as segment n. Scenes whose
/// directory already holds a matching clip are reused. Errors: EmptyScript;
/// InvalidArgument when scene and segment counts differ; GenerationFailed
/// listing every failed scene (finished scenes stay on disk).
std::vector<ClipArtifact> generate_all(const VideoScript& script, const SegmentPlan& plan, std::string_view style_text,
                                       VideoBackend& backend, const GenerationSettings& settings,
                                       const std::filesystem::path& clips_dir);

}  // namespace mvgen
