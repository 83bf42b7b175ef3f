#include "mvgen/scripting/script_parser.h"

#include <cctype>
#include <optional>

#include "mvgen/util/error.h"
#include "mvgen/util/hashing.h"

namespace mvgen {

using nlohmann::json;

namespace {

constexpr std::string_view kBeginMarker = "BEGIN SCRIPT";
constexpr std::string_view kEndMarker = "END SCRIPT";
constexpr std::string_view kScenePrefix = "SCENE ";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

struct Marker {
  int number;
  std::size_t text_begin;  ///< offset just past the colon
};

// Recognizes "SCENE <digits>:" at the start of `line` (after indentation).
std::optional<Marker> match_marker(std::string_view line, std::size_t line_offset) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (line.substr(i, kScenePrefix.size()) != kScenePrefix) return std::nullopt;
  i += kScenePrefix.size();
  const std::size_t digits_begin = i;
  long long value = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    if (i - digits_begin >= 9) return std::nullopt;
    value = value * 10 + (line[i] - '0');
    ++i;
  }
  if (i == digits_begin || i >= line.size() || line[i] != ':') return std::nullopt;
  return Marker{static_cast<int>(value), line_offset + i + 1};
}

}  // namespace

std::string_view to_string(ScriptSource source) {
  return source == ScriptSource::LalmPipeline ? "lalm" : "clap";
}

ScriptSource script_source_from_string(std::string_view name) {
  if (name == "clap") return ScriptSource::ClapPipeline;
  if (name == "lalm") return ScriptSource::LalmPipeline;
  throw Error(ErrorCode::ManifestCorrupt, "unknown script source: " + std::string(name));
}

VideoScript parse_script(std::string_view raw, std::size_t expected_scenes, ScriptSource source) {
  const std::size_t begin = raw.rfind(kBeginMarker);
  if (begin == std::string_view::npos) {
    throw Error(ErrorCode::MissingBeginMarker, "response contains no \"BEGIN SCRIPT\" marker");
  }
  std::string_view body = raw.substr(begin + kBeginMarker.size());
  if (const std::size_t end = body.find(kEndMarker); end != std::string_view::npos) body = body.substr(0, end);

  // Locate marker lines, then cut the text between them.
  std::vector<Marker> markers;
  std::vector<std::size_t> line_starts;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t nl = body.find('\n', pos);
    const std::size_t line_end = nl == std::string_view::npos ? body.size() : nl;
    if (auto m = match_marker(body.substr(pos, line_end - pos), pos)) {
      markers.push_back(*m);
      line_starts.push_back(pos);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  VideoScript script;
  script.raw_response = std::string(raw);
  script.source = source;
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const std::size_t stop = k + 1 < markers.size() ? line_starts[k + 1] : body.size();
    const std::size_t from = std::min(markers[k].text_begin, stop);
    script.scenes.push_back(Scene{markers[k].number, std::string(trim(body.substr(from, stop - from)))});
  }

  if (script.scenes.empty()) {
    throw Error(ErrorCode::EmptyScript, "no \"SCENE <n>:\" markers after \"BEGIN SCRIPT\"");
  }
  if (script.scenes.size() != expected_scenes) {
    throw Error(ErrorCode::SceneCountMismatch,
                "found " + std::to_string(script.scenes.size()) + " scenes, expected " +
                    std::to_string(expected_scenes),
                {{"found", script.scenes.size()}, {"expected", expected_scenes}});
  }
  for (std::size_t k = 0; k < script.scenes.size(); ++k) {
    if (script.scenes[k].number != static_cast<int>(k + 1)) {
      throw Error(ErrorCode::NonContiguousNumbering,
                  "scene " + std::to_string(k + 1) + " is numbered " + std::to_string(script.scenes[k].number),
                  {{"position", k + 1}, {"number", script.scenes[k].number}});
    }
  }
  return script;
}

std::string serialize_script(const VideoScript& script) {
  std::string out = std::string(kBeginMarker) + "\n\n";
  for (const Scene& s : script.scenes) out += "SCENE " + std::to_string(s.number) + ": " + s.description + "\n\n";
  out += std::string(kEndMarker) + "\n";
  return out;
}

std::string_view to_string(FindingKind kind) {
  switch (kind) {
    case FindingKind::CountMismatch: return "CountMismatch";
    case FindingKind::NonContiguousNumbering: return "NonContiguousNumbering";
    case FindingKind::EmptyDescription: return "EmptyDescription";
    case FindingKind::MultiSentence: return "MultiSentence";
    case FindingKind::TooLong: return "TooLong";
  }
  return "CountMismatch";
}

std::size_t count_sentences(std::string_view text) {
  text = trim(text);
  if (text.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i;
    while (j + 1 < text.size() && (text[j + 1] == '.' || text[j + 1] == '!' || text[j + 1] == '?')) ++j;
    if (j + 1 == text.size() || is_space(text[j + 1])) ++count;
    i = j;
  }
  // Trailing text without terminal punctuation is one more sentence.
  const char last = text.back();
  if (last != '.' && last != '!' && last != '?') ++count;
  return count;
}

namespace {

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

}  // namespace

ValidationReport validate_script(const VideoScript& script, const SegmentPlan& plan) {
  ValidationReport r;
  if (script.scenes.size() != plan.segments.size()) {
    r.hard.push_back({FindingKind::CountMismatch, 0,
                      std::to_string(script.scenes.size()) + " scenes for " + std::to_string(plan.segments.size()) +
                          " segments"});
  }
  for (std::size_t k = 0; k < script.scenes.size(); ++k) {
    const Scene& s = script.scenes[k];
    if (s.number != static_cast<int>(k + 1)) {
      r.hard.push_back({FindingKind::NonContiguousNumbering, s.number,
                        "scene at position " + std::to_string(k + 1) + " is numbered " + std::to_string(s.number)});
    }
    if (trim(s.description).empty()) {
      r.hard.push_back({FindingKind::EmptyDescription, s.number, "scene has no description"});
      continue;
    }
    if (const std::size_t n = count_sentences(s.description); n > 1) {
      r.soft.push_back({FindingKind::MultiSentence, s.number, std::to_string(n) + " sentences"});
    }
    if (const std::size_t w = count_words(s.description); w > kMaxSceneWords) {
      r.soft.push_back({FindingKind::TooLong, s.number, std::to_string(w) + " words"});
    }
  }
  return r;
}

json to_json(const ValidationReport& report) {
  auto list = [](const std::vector<Finding>& fs) {
    json arr = json::array();
    for (const auto& f : fs) {
      arr.push_back({{"kind", to_string(f.kind)}, {"scene", f.scene_number}, {"message", f.message}});
    }
    return arr;
  };
  return {{"hard", list(report.hard)}, {"soft", list(report.soft)}};
}

json to_json(const VideoScript& script) {
  json scenes = json::array();
  for (const Scene& s : script.scenes) scenes.push_back({{"number", s.number}, {"description", s.description}});
  return {{"source", to_string(script.source)},
          {"scenes", scenes},
          {"raw_response_sha256", sha256_hex(script.raw_response)}};
}

VideoScript video_script_from_json(const json& doc) {
  VideoScript s;
  try {
    s.source = script_source_from_string(doc.at("source").get<std::string>());
    for (const json& j : doc.at("scenes")) {
      s.scenes.push_back(Scene{j.at("number").get<int>(), j.at("description").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ManifestCorrupt, std::string("malformed script document: ") + e.what());
  }
  return s;
}

}  // namespace mvgen
