#pragma once

/// @file script_parser.h
/// @brief Extraction and validation of scene scripts from model output.
///
/// Everything before the last "BEGIN SCRIPT" is discarded, which drops
/// reasoning preambles that mention the marker. Scene markers are lines
/// starting with "SCENE <n>:" (case-sensitive, leading whitespace allowed).
/// A scene's text runs to the next marker line, an "END SCRIPT" trailer, or
/// the end of input, and is trimmed.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mvgen/segmentation/types.h"

namespace mvgen {

enum class ScriptSource { ClapPipeline, LalmPipeline };
std::string_view to_string(ScriptSource source);
ScriptSource script_source_from_string(std::string_view name);

struct Scene {
  int number = 0;  ///< 1-based
  std::string description;
};

struct VideoScript {
  std::vector<Scene> scenes;
  std::string raw_response;
  ScriptSource source = ScriptSource::ClapPipeline;
};

/// Errors: MissingBeginMarker; EmptyScript when no marker follows it;
/// SceneCountMismatch with details {found,
/// expected}; NonContiguousNumbering when numbers are not 1..N in order.
VideoScript parse_script(std::string_view raw, std::size_t expected_scenes,
                         ScriptSource source = ScriptSource::ClapPipeline);

/// Canonical script text ("BEGIN SCRIPT", one marker line per scene,
/// "END SCRIPT"); parse_script recovers the same numbers and texts.
std::string serialize_script(const VideoScript& script);

enum class FindingKind { CountMismatch, NonContiguousNumbering, EmptyDescription, MultiSentence, TooLong };
std::string_view to_string(FindingKind kind);

struct Finding {
  FindingKind kind;
  int scene_number = 0;  ///< 0 for script-level findings
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> hard;  ///< the script cannot drive generation
  std::vector<Finding> soft;  ///< instructions the model did not follow
  bool ok() const { return hard.empty(); }
};

/// Scenes longer than this many words draw a TooLong warning.
inline constexpr std::size_t kMaxSceneWords = 60;

/// Sentences in a description: runs of terminal punctuation (. ! ?)
/// followed by whitespace or the end count once each.
std::size_t count_sentences(std::string_view text);

ValidationReport validate_script(const VideoScript& script, const SegmentPlan& plan);
nlohmann::json to_json(const ValidationReport& report);

/// {"source", "scenes": [{"number", "description"}], "raw_response_sha256"}.
nlohmann::json to_json(const VideoScript& script);
/// raw_response is left empty. Errors: ManifestCorrupt.
VideoScript video_script_from_json(const nlohmann::json& doc);

}  // namespace mvgen
