#pragma once

/// @file prompt_builder.h
/// @brief Prompt templates for the script-writing and story pipelines.

#include <optional>
#include <string>
#include <vector>

#include "mvgen/backends/protocol.h"
#include "mvgen/segmentation/types.h"
#include "mvgen/taxonomy/classifier.h"

namespace mvgen {

/// Default character line of the script template.
inline constexpr const char* kAnimalCharacterDirective =
    "The story should include at least one animal character. For consistency, repeat the animal's description in "
    "every scene.";
inline constexpr const char* kFourPeopleCharacterDirective =
    "The story should include at least four people. For consistency, repeat their descriptions in every scene.";

struct ScriptPromptOptions {
  /// Appended to the opening line after one space; omitted when unset or empty.
  std::optional<std::string> additional_prompt;
  /// Full line describing the characters. Must not be empty.
  std::string character_directive = kAnimalCharacterDirective;
  /// Overrides the guideline sentences rendered from the visual style.
  std::optional<std::string> style_guideline_text;
};

/// Scene length as the template prints it: rounded to two decimals with
/// trailing zeros dropped, keeping at least one decimal ("6.2", "5.49", "7.0").
std::string format_scene_duration(double seconds);

/// Guideline sentences for the visual style, each followed by one space.
std::string style_guideline_text(const TrackAnalysis& track);

/// Script prompt for the analysis pipeline. Errors: InvalidArgument for
/// zero segments or an empty character directive.
std::string build_clap_script_prompt(const TrackAnalysis& track, const std::vector<SegmentAnalysis>& segments,
                                     const ScriptPromptOptions& options = {});

inline constexpr const char* kStorySystemPrompt = "You are a helpful assistant.";

/// User text of the story request. With no additional prompt the
/// placeholder collapses to nothing, leaving two spaces between sentences.
std::string lalm_story_text(const std::optional<std::string>& additional_prompt);

/// System message plus one user message carrying the song and the story
/// text. Errors: IoError when the audio cannot be resolved.
Conversation build_lalm_story_request(const AudioRef& song, const std::optional<std::string>& additional_prompt);

/// Plain-text rendering of a conversation for the run directory. Audio
/// attachments appear as `<audio: file name>`.
std::string render_conversation(const Conversation& conversation);

struct StoryConcept {
  std::string text;
  std::string song_ref;  ///< audio file the story was written for
};

struct DecompositionOptions {
  std::optional<std::string> additional_prompt;
  /// Optional character line; omitted when empty.
  std::string character_directive;
  /// Optional visual guideline sentences (track-level analysis).
  std::optional<std::string> style_guideline_text;
};

/// Prompt asking a reasoning model to split a story into one scene per
/// segment, with the same output-format instructions as the script prompt.
/// Errors: InvalidArgument for an empty story or plan.
std::string build_decomposition_prompt(const StoryConcept& story, const SegmentPlan& plan,
                                       const DecompositionOptions& options = {});

}  // namespace mvgen
