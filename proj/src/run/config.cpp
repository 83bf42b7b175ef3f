#include "mvgen/run/config.h"

#include <cstdlib>
#include <functional>
#include <map>

#include "mvgen/backends/http_backends.h"
#include "mvgen/backends/mock_backends.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"
#include "mvgen/util/hashing.h"

namespace mvgen {

using nlohmann::json;

namespace {

json segmentation_to_json(const SegmentationConfig& s) {
  return {{"min_random_s", s.min_random_s},
          {"max_random_s", s.max_random_s},
          {"max_rule_s", s.max_rule_s},
          {"beats_per_cut", s.beats_per_cut},
          {"min_segment_s", s.min_segment_s},
          {"novelty_threshold_k", s.novelty_threshold_k},
          {"novelty_window_s", s.novelty_window_s},
          {"novelty_floor", s.novelty_floor},
          {"sustain_filter_s", s.sustain_filter_s},
          {"stft_window", s.stft_window},
          {"stft_hop", s.stft_hop},
          {"tempo_min_bpm", s.tempo_min_bpm},
          {"tempo_max_bpm", s.tempo_max_bpm}};
}

using Setter = std::function<void(const json&)>;

template <typename T>
Setter assign(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

// Numbers must be JSON numbers; nlohmann would otherwise accept booleans.
template <typename T>
Setter assign_number(T& field) {
  return [&field](const json& v) {
    if (!v.is_number()) throw json::type_error::create(302, "expected a number", &v);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw json::type_error::create(302, "expected an integer", &v);
    }
    field = v.get<T>();
  };
}

void apply_keys(const json& doc, const std::map<std::string, Setter>& setters, const std::string& prefix,
                std::vector<std::string>& problems) {
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) {
      problems.push_back("unknown key: " + prefix + key);
      continue;
    }
    try {
      it->second(value);
    } catch (const json::exception&) {
      problems.push_back("bad value for " + prefix + key + ": " + value.dump());
    } catch (const Error& e) {
      problems.push_back(prefix + key + ": " + e.what());
    }
  }
}

std::optional<std::string> auth_token() {
  const char* t = std::getenv(kAuthTokenEnv);
  if (!t || !*t) return std::nullopt;
  return std::string(t);
}

BackendEndpointConfig endpoint(const RunConfig& c, const std::string& url, BackendKind kind) {
  BackendEndpointConfig e;
  e.base_url = url;
  e.kind = kind;
  e.timeout_s = c.timeout_s;
  e.max_retries = c.max_retries;
  e.auth_token = auth_token();
  return e;
}

}  // namespace

std::string_view to_string(PipelineKind kind) { return kind == PipelineKind::Lalm ? "lalm" : "clap"; }

PipelineKind pipeline_kind_from_string(std::string_view name) {
  if (name == "clap") return PipelineKind::Clap;
  if (name == "lalm") return PipelineKind::Lalm;
  throw Error(ErrorCode::ConfigInvalid, "unknown pipeline: " + std::string(name));
}

std::vector<std::string> RunConfig::problems() const {
  std::vector<std::string> p;
  const std::vector<std::pair<const char*, const std::string*>> urls = {
      {"embed_url", &embed_url}, {"chat_url", &chat_url}, {"chat_audio_url", &chat_audio_url}, {"video_url", &video_url}};
  if (mock) {
    for (const auto& [name, url] : urls) {
      if (!url->empty()) p.push_back(std::string(name) + " must be empty when mock is set");
    }
  } else {
    std::vector<std::pair<const char*, const std::string*>> needed;
    if (pipeline == PipelineKind::Clap) {
      needed = {urls[0], urls[1], urls[3]};
    } else {
      needed = {urls[2], urls[1], urls[3]};
    }
    for (const auto& [name, url] : needed) {
      if (url->empty()) p.push_back(std::string(name) + " is required for the " + std::string(to_string(pipeline)) +
                                    " pipeline without mock");
    }
  }
  if (!(timeout_s > 0.0)) p.emplace_back("timeout_s must be > 0");
  if (max_retries < 0) p.emplace_back("max_retries must be >= 0");
  if (width <= 0 || height <= 0) p.emplace_back("width and height must be > 0");
  if (!(fps > 0.0)) p.emplace_back("fps must be > 0");
  if (script_retries < 0) p.emplace_back("script_retries must be >= 0");
  if (analysis_rate < 8000) p.emplace_back("analysis_rate must be >= 8000");
  if (max_concurrency < 1) p.emplace_back("max_concurrency must be >= 1");
  if (!(temperature >= 0.0)) p.emplace_back("temperature must be >= 0");
  if (container == ContainerKind::Mp4ViaMuxer && muxer_command.empty()) {
    p.emplace_back("muxer_command must not be empty for the mp4 container");
  }
  try {
    segmentation.validate();
  } catch (const Error& e) {
    for (const auto& s : e.details().value("problems", json::array())) p.push_back("segmentation." + s.get<std::string>());
  }
  return p;
}

void RunConfig::validate() const {
  const auto p = problems();
  if (!p.empty()) throw Error(ErrorCode::ConfigInvalid, "invalid configuration", {{"problems", p}});
}

SegmentationConfig RunConfig::segmentation_config() const {
  SegmentationConfig s = segmentation;
  s.seed = seed;
  return s;
}

const std::vector<std::string>& transport_config_keys() {
  static const std::vector<std::string> keys = {"embed_url", "chat_url",  "chat_audio_url",
                                                "video_url", "timeout_s", "max_retries"};
  return keys;
}

json to_json(const RunConfig& c) {
  json j = {{"pipeline", to_string(c.pipeline)},
            {"segmenter", c.segmenter == SegmentationMethod::Random ? "random" : "rules"},
            {"seed", c.seed},
            {"mock", c.mock},
            {"embed_url", c.embed_url},
            {"chat_url", c.chat_url},
            {"chat_audio_url", c.chat_audio_url},
            {"video_url", c.video_url},
            {"timeout_s", c.timeout_s},
            {"max_retries", c.max_retries},
            {"width", c.width},
            {"height", c.height},
            {"fps", c.fps},
            {"conform", to_string(c.conform)},
            {"taxonomy_path", c.taxonomy_path},
            {"container", to_string(c.container)},
            {"muxer_command", c.muxer_command},
            {"script_retries", c.script_retries},
            {"analysis_rate", c.analysis_rate},
            {"segmentation", segmentation_to_json(c.segmentation)},
            {"additional_prompt", c.additional_prompt ? json(*c.additional_prompt) : json(nullptr)},
            {"character_directive", c.character_directive},
            {"temperature", c.temperature},
            {"max_concurrency", c.max_concurrency}};
  return j;
}

RunConfig run_config_from_json(const json& doc, const RunConfig& base) {
  if (!doc.is_object()) throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
  RunConfig c = base;
  std::vector<std::string> problems;
  auto& s = c.segmentation;
  const std::map<std::string, Setter> seg_setters = {
      {"min_random_s", assign_number(s.min_random_s)},
      {"max_random_s", assign_number(s.max_random_s)},
      {"max_rule_s", assign_number(s.max_rule_s)},
      {"beats_per_cut", assign_number(s.beats_per_cut)},
      {"min_segment_s", assign_number(s.min_segment_s)},
      {"novelty_threshold_k", assign_number(s.novelty_threshold_k)},
      {"novelty_window_s", assign_number(s.novelty_window_s)},
      {"novelty_floor", assign_number(s.novelty_floor)},
      {"sustain_filter_s", assign_number(s.sustain_filter_s)},
      {"stft_window", assign_number(s.stft_window)},
      {"stft_hop", assign_number(s.stft_hop)},
      {"tempo_min_bpm", assign_number(s.tempo_min_bpm)},
      {"tempo_max_bpm", assign_number(s.tempo_max_bpm)},
  };
  const std::map<std::string, Setter> setters = {
      {"pipeline", [&](const json& v) { c.pipeline = pipeline_kind_from_string(v.get<std::string>()); }},
      {"segmenter",
       [&](const json& v) {
         const auto name = v.get<std::string>();
         if (name == "random") {
           c.segmenter = SegmentationMethod::Random;
         } else if (name == "rules") {
           c.segmenter = SegmentationMethod::RuleBased;
         } else {
           throw Error(ErrorCode::ConfigInvalid, "unknown segmenter: " + name + " (expected random or rules)");
         }
       }},
      {"seed", assign_number(c.seed)},
      {"mock", assign(c.mock)},
      {"embed_url", assign(c.embed_url)},
      {"chat_url", assign(c.chat_url)},
      {"chat_audio_url", assign(c.chat_audio_url)},
      {"video_url", assign(c.video_url)},
      {"timeout_s", assign_number(c.timeout_s)},
      {"max_retries", assign_number(c.max_retries)},
      {"width", assign_number(c.width)},
      {"height", assign_number(c.height)},
      {"fps", assign_number(c.fps)},
      {"conform", [&](const json& v) { c.conform = conform_policy_from_string(v.get<std::string>()); }},
      {"taxonomy_path", assign(c.taxonomy_path)},
      {"container", [&](const json& v) { c.container = container_kind_from_string(v.get<std::string>()); }},
      {"muxer_command", assign(c.muxer_command)},
      {"script_retries", assign_number(c.script_retries)},
      {"analysis_rate", assign_number(c.analysis_rate)},
      {"segmentation",
       [&](const json& v) {
         if (!v.is_object()) throw json::type_error::create(302, "expected an object", &v);
         apply_keys(v, seg_setters, "segmentation.", problems);
       }},
      {"additional_prompt",
       [&](const json& v) {
         if (v.is_null()) {
           c.additional_prompt.reset();
         } else {
           c.additional_prompt = v.get<std::string>();
         }
       }},
      {"character_directive", assign(c.character_directive)},
      {"temperature", assign_number(c.temperature)},
      {"max_concurrency", assign_number(c.max_concurrency)},
  };
  apply_keys(doc, setters, "", problems);
  if (!problems.empty()) throw Error(ErrorCode::ConfigInvalid, "invalid configuration", {{"problems", problems}});
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base) {
  const json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::ConfigInvalid, "config file is not valid JSON: " + path.string());
  return run_config_from_json(doc, base);
}

std::string canonical_config(const RunConfig& config) { return to_json(config).dump(); }

std::string config_hash(const RunConfig& config) { return sha256_hex(canonical_config(config)); }

BackendSet make_backends(const RunConfig& c) {
  if (c.mock) return make_mock_backends(c.seed);
  BackendSet set;
  if (!c.embed_url.empty()) {
    set.embed = std::make_shared<HttpEmbeddingBackend>(endpoint(c, c.embed_url, BackendKind::Embed));
  }
  if (!c.chat_url.empty()) set.chat = std::make_shared<HttpChatBackend>(endpoint(c, c.chat_url, BackendKind::Chat));
  if (!c.chat_audio_url.empty()) {
    set.chat_audio = std::make_shared<HttpChatBackend>(endpoint(c, c.chat_audio_url, BackendKind::ChatAudio));
  }
  if (!c.video_url.empty()) {
    set.video = std::make_shared<HttpVideoBackend>(endpoint(c, c.video_url, BackendKind::Video));
  }
  return set;
}

}  // namespace mvgen
