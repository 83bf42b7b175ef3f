#include "mvgen/scripting/prompt_builder.h"

#include <cmath>
#include <filesystem>

#include "mvgen/taxonomy/analysis_io.h"
#include "mvgen/util/error.h"

namespace mvgen {

namespace {

// Template lines are kept exactly as the models were prompted, spelling included.
constexpr const char* kOpening = "You need to think of a story and a script for a music video.";
constexpr const char* kStructure = "The story structure needs to have a beginning, middle and an ending.";
constexpr const char* kBasedOn =
    "You will write the story based on the characteristics of the music that are provided to you.";
constexpr const char* kToldAs =
    "The story needs to be told as descriptions of sccenes that will appear in a music video.";
constexpr const char* kLayout =
    "The structure needs to be reflected in the scene layout, to try to mimic the story's progression.";
constexpr const char* kConcrete =
    "Make sure the scene descriptions are concrete and to the point, they need to be easy for a text2video model "
    "to generate videos from.";
constexpr const char* kWholeSong = "When listening to the entire song, it can be described like this:";
constexpr const char* kSegments = "When listening to individual segments, they can be described like this:";
constexpr const char* kGuidelines = "Each scene needs to visually match the following guidelines:";
constexpr const char* kBrief =
    "Scene descriptions need to be as brief as possible. Every scene can be described in one sentence at the "
    "most. Omit all unnecesary details from the description.";
constexpr const char* kMarker =
    "In your response, start the description of every scene with the exact letters: \"SCENE #:\", '#' "
    "substituted with the scene number. Do NOT add any special or any other type of characters to this line! "
    "Example: \"SCENE 1:\\n\"";
constexpr const char* kBegin =
    "Before the start of the script, add the words \"BEGIN SCRIPT\\n\" so that I can easily extract it.";

constexpr const char* kStoryAsk = "Think of a story for a music video for this song.";
constexpr const char* kStoryEngage =
    "The story should be engaging and visually appealing, with a focus on the emotions conveyed by the music and "
    "lyrics.";

std::string scene_count_line(std::size_t n) { return "There are " + std::to_string(n) + " scenes in total."; }

std::string scene_length_sentence(double seconds) {
  return "The scene will be " + format_scene_duration(seconds) + " seconds long.";
}

bool has_text(const std::optional<std::string>& s) { return s && !s->empty(); }

}  // namespace

std::string format_scene_duration(double seconds) {
  MVGEN_CHECK(std::isfinite(seconds) && seconds >= 0.0, ErrorCode::InvalidArgument, "invalid scene duration");
  const long long cents = std::llround(seconds * 100.0);
  const long long whole = cents / 100;
  const long long frac = cents % 100;
  if (frac % 10 == 0) return std::to_string(whole) + "." + std::to_string(frac / 10);
  return std::to_string(whole) + "." + (frac < 10 ? "0" : "") + std::to_string(frac);
}

std::string style_guideline_text(const TrackAnalysis& track) { return render_sentences(track.visual_style); }

std::string build_clap_script_prompt(const TrackAnalysis& track, const std::vector<SegmentAnalysis>& segments,
                                     const ScriptPromptOptions& options) {
  MVGEN_CHECK(!segments.empty(), ErrorCode::InvalidArgument, "script prompt needs at least one segment");
  MVGEN_CHECK(!options.character_directive.empty(), ErrorCode::InvalidArgument,
              "character directive must not be empty");

  std::string p = kOpening;
  if (has_text(options.additional_prompt)) p += " " + *options.additional_prompt;
  p += "\n";
  for (const char* line : {kStructure, kBasedOn, kToldAs, kLayout}) p += std::string(line) + "\n";
  p += options.character_directive + "\n";
  p += std::string(kConcrete) + "\n";
  p += scene_count_line(segments.size()) + "\n";
  p += std::string(kWholeSong) + "\n";
  p += "the overall " + render_sentences(track.content_style) + "\n\n";
  p += std::string(kSegments) + "\n\n";
  for (std::size_t i = 0; i < segments.size(); ++i) {
    p += "Scene " + std::to_string(i + 1) + ":\n";
    p += render_sentences(segments[i].classifications) + scene_length_sentence(segments[i].duration_s) + "\n";
  }
  p += "\n";
  p += std::string(kGuidelines) + "\n";
  p += options.style_guideline_text.value_or(style_guideline_text(track)) + "\n\n";
  p += std::string(kBrief) + "\n";
  p += std::string(kMarker) + "\n";
  p += kBegin;
  return p;
}

std::string lalm_story_text(const std::optional<std::string>& additional_prompt) {
  return std::string(kStoryAsk) + " " + (has_text(additional_prompt) ? *additional_prompt : "") + " " + kStoryEngage;
}

Conversation build_lalm_story_request(const AudioRef& song, const std::optional<std::string>& additional_prompt) {
  if (!song.wav_bytes) {
    std::error_code ec;
    if (song.path.empty() || !std::filesystem::is_regular_file(song.path, ec)) {
      throw Error(ErrorCode::IoError, "song audio not found: " + song.path.string());
    }
  }
  Conversation c;
  c.push_back(ChatMessage{ChatRole::System, std::string(kStorySystemPrompt), std::nullopt});
  c.push_back(ChatMessage{ChatRole::User, lalm_story_text(additional_prompt), song});
  return c;
}

std::string render_conversation(const Conversation& conversation) {
  std::string out;
  for (const ChatMessage& m : conversation) {
    if (!out.empty()) out += "\n";
    out += "[" + std::string(to_string(m.role)) + "]\n";
    if (m.audio) {
      const std::string name = m.audio->path.empty() ? "inline" : m.audio->path.filename().string();
      out += "<audio: " + name + ">\n";
    }
    if (m.text) out += *m.text + "\n";
  }
  return out;
}

std::string build_decomposition_prompt(const StoryConcept& story, const SegmentPlan& plan,
                                       const DecompositionOptions& options) {
  MVGEN_CHECK(story.text.find_first_not_of(" \t\r\n") != std::string::npos, ErrorCode::InvalidArgument,
              "story text is empty");
  MVGEN_CHECK(!plan.segments.empty(), ErrorCode::InvalidArgument, "segment plan is empty");

  std::string p = "You need to turn the following story into a script for a music video.";
  if (has_text(options.additional_prompt)) p += " " + *options.additional_prompt;
  p += "\n";
  p += "The story:\n" + story.text + "\n\n";
  p += "The script needs to follow the story's beginning, middle and ending across the scenes, in order.\n";
  p += std::string(kToldAs) + "\n";
  if (!options.character_directive.empty()) p += options.character_directive + "\n";
  p += std::string(kConcrete) + "\n";
  p += scene_count_line(plan.segments.size()) + "\n";
  p += "The scenes follow the song's segments, which have these lengths:\n\n";
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    p += "Scene " + std::to_string(i + 1) + ":\n" + scene_length_sentence(plan.segments[i].duration()) + "\n";
  }
  p += "\n";
  if (has_text(options.style_guideline_text)) {
    p += std::string(kGuidelines) + "\n" + *options.style_guideline_text + "\n\n";
  }
  p += std::string(kBrief) + "\n";
  p += std::string(kMarker) + "\n";
  p += kBegin;
  return p;
}

}  // namespace mvgen
