#pragma once

/// @file assembler.h
/// @brief Final assembly: clips in scene order over the original audio.
///
/// ManifestOnly writes a deterministic JSON description of the cut (frame
/// ranges per scene plus the audio reference) for environments without a
/// muxer. Mp4ViaMuxer links every frame into one numbered sequence and runs an
/// external muxer built from an argv template, without a shell. The template
/// placeholders are {frames_pattern}, {fps}, {audio} and {out}.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvgen/generation/clip_generator.h"

namespace mvgen {

enum class ContainerKind { Mp4ViaMuxer, ManifestOnly };
std::string_view to_string(ContainerKind kind);
ContainerKind container_kind_from_string(std::string_view name);

/// ffmpeg invocation that copies the audio stream unchanged.
std::vector<std::string> default_muxer_command();

struct AssemblySpec {
  std::vector<ClipArtifact> clips;
  /// Scene count the clips must cover; 0 means clips.size().
  std::size_t expected_scenes = 0;
  std::filesystem::path audio_path;
  std::filesystem::path output_path;
  ContainerKind container = ContainerKind::ManifestOnly;
  std::vector<std::string> muxer_command = default_muxer_command();
  /// Paths in the manifest are written relative to this directory.
  std::filesystem::path base_dir;
  /// Overrides the audio duration read from the WAV header.
  std::optional<double> audio_duration_s;
};

struct AssemblyResult {
  std::filesystem::path output_path;
  double video_duration_s = 0.0;
  double audio_duration_s = 0.0;
  std::size_t frame_count = 0;
};

/// Errors: MissingClip(n) for the first scene without a clip (or no clips at
/// all), InvalidArgument for mixed fps or frame sizes, DurationMismatch when
/// |video - audio| exceeds one frame per clip, MuxerUnavailable, MuxerFailed.
AssemblyResult assemble_video(const AssemblySpec& spec);

/// The ManifestOnly document, also used to describe muxed output.
nlohmann::json assembly_manifest(const AssemblySpec& spec, double audio_duration_s);

/// Resolves an executable name against PATH (names containing '/' are
/// checked directly). Empty when not found.
std::optional<std::filesystem::path> find_executable(const std::string& name);

}  // namespace mvgen
