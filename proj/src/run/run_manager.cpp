#include "mvgen/run/run_manager.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <ctime>

#include "mvgen/assembly/assembler.h"
#include "mvgen/audio/wav_io.h"
#include "mvgen/generation/clip_generator.h"
#include "mvgen/scripting/prompt_builder.h"
#include "mvgen/scripting/script_parser.h"
#include "mvgen/scripting/script_request.h"
#include "mvgen/segmentation/segment_plan_io.h"
#include "mvgen/segmentation/segmenter.h"
#include "mvgen/taxonomy/analysis_io.h"
#include "mvgen/taxonomy/classifier.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"
#include "mvgen/util/hashing.h"

namespace mvgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSubdirs[] = {"segments", "analysis", "prompts", "scripts", "clips", "output"};
constexpr const char* kSegmentsJson = "segments/segments.json";
constexpr const char* kSegmentsTxt = "segments/segments.txt";
constexpr const char* kTrackTxt = "analysis/track.txt";
constexpr const char* kAnalysisJson = "analysis/analysis.json";
constexpr const char* kScriptPrompt = "prompts/script_prompt.txt";
constexpr const char* kStoryPrompt = "prompts/story_prompt.txt";
constexpr const char* kStory = "scripts/story.txt";
constexpr const char* kRawResponse = "scripts/raw_response.txt";
constexpr const char* kParsedScript = "scripts/parsed_script.json";
constexpr const char* kValidation = "scripts/validation.json";

std::string now_iso8601() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json read_json(const fs::path& path, ErrorCode code) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(code, "missing file: " + path.string());
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw Error(code, "not valid JSON: " + path.string());
  return doc;
}

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

std::string segment_file(std::size_t i) { return "analysis/segment_" + std::to_string(i) + ".txt"; }

void save_locked(const fs::path& run_dir, const RunManifest& m) { write_json(run_dir / kManifestFile, to_json(m)); }

LabelTaxonomy run_taxonomy(const RunConfig& c) {
  return c.taxonomy_path.empty() ? default_taxonomy() : load_taxonomy(c.taxonomy_path);
}

template <typename T>
T& require(const std::shared_ptr<T>& backend, const char* what) {
  if (!backend) throw Error(ErrorCode::ConfigInvalid, std::string("no ") + what + " backend configured");
  return *backend;
}

SegmentPlan load_plan(const fs::path& run_dir) {
  return segment_plan_from_json(read_json(run_dir / kSegmentsJson, ErrorCode::IntegrityError));
}

std::string directive(const RunConfig& c) {
  return c.character_directive.empty() ? std::string(kAnimalCharacterDirective) : c.character_directive;
}

// Stage bodies. Each returns the artifacts it produced, relative to run_dir.

std::vector<std::string> do_segment(const fs::path& run_dir, const RunManifest& m) {
  const RunConfig& c = m.config;
  const SegmentationConfig sc = c.segmentation_config();
  sc.validate();
  SegmentPlan plan;
  if (c.segmenter == SegmentationMethod::Random) {
    const WavData wav = read_wav(run_dir / kInputFile);
    if (wav.frames() == 0) throw Error(ErrorCode::ZeroLength, "input audio is empty");
    plan = segment_random(static_cast<double>(wav.frames()) / wav.sample_rate, sc);
  } else {
    plan = segment_rule_based(load_audio(run_dir / kInputFile, c.analysis_rate), sc);
  }
  check_tiling(plan);
  write_json(run_dir / kSegmentsJson, to_json(plan));
  write_file_atomic(run_dir / kSegmentsTxt, to_text(plan));
  return {kSegmentsJson, kSegmentsTxt};
}

std::vector<std::string> do_analyze(const fs::path& run_dir, const RunManifest& m, const BackendSet& backends) {
  const RunConfig& c = m.config;
  const SegmentPlan plan = load_plan(run_dir);
  const LabelTaxonomy taxonomy = run_taxonomy(c);
  AnalysisBundle bundle;
  bundle.taxonomy_version = taxonomy.version;

  // Stale per-segment files from an earlier plan must not survive a re-run.
  for (const auto& entry : fs::directory_iterator(run_dir / "analysis")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("segment_", 0) == 0) fs::remove(entry.path());
  }

  const bool per_segment = c.pipeline == PipelineKind::Clap;
  if (per_segment || backends.embed) {
    EmbeddingBackend& embed = require(backends.embed, "embedding");
    const AudioBuffer buffer = load_audio(run_dir / kInputFile, c.analysis_rate);
    LabelEmbeddingCache cache;
    bundle.track = analyze_track(buffer, taxonomy, embed, &cache);
    if (per_segment) {
      AnalysisOptions opts;
      opts.max_concurrency = c.max_concurrency;
      opts.cache = &cache;
      bundle.segments = analyze_segments(buffer, plan, taxonomy, embed, opts);
    }
  }

  std::vector<std::string> artifacts = {kAnalysisJson, kTrackTxt};
  write_file_atomic(run_dir / kTrackTxt, track_analysis_text(bundle.track));
  for (std::size_t i = 0; i < bundle.segments.size(); ++i) {
    write_file_atomic(run_dir / segment_file(i), segment_analysis_text(bundle.segments[i]));
    artifacts.push_back(segment_file(i));
  }
  write_json(run_dir / kAnalysisJson, to_json(bundle));
  return artifacts;
}

std::string story_locked(const fs::path& run_dir, const RunManifest& m, const BackendSet& backends, bool force) {
  const fs::path story_path = run_dir / kStory;
  std::error_code ec;
  if (!force && fs::is_regular_file(story_path, ec)) return read_file(story_path);
  ChatBackend& chat = require(backends.chat_audio, "audio chat");
  AudioRef song{run_dir / kInputFile, std::nullopt};
  const Conversation conv = build_lalm_story_request(song, m.config.additional_prompt);
  ChatOptions opts{m.config.seed, m.config.temperature};
  return request_chat(conv, render_conversation(conv), chat, opts, {run_dir / kStoryPrompt, story_path});
}

bool is_script_error(ErrorCode code) {
  return code == ErrorCode::MissingBeginMarker || code == ErrorCode::SceneCountMismatch ||
         code == ErrorCode::NonContiguousNumbering || code == ErrorCode::EmptyScript ||
         code == ErrorCode::EmptyResponse;
}

std::vector<std::string> do_script(const fs::path& run_dir, const RunManifest& m, const BackendSet& backends) {
  const RunConfig& c = m.config;
  const SegmentPlan plan = load_plan(run_dir);
  const AnalysisBundle bundle = analysis_from_json(read_json(run_dir / kAnalysisJson, ErrorCode::IntegrityError));
  ChatBackend& chat = require(backends.chat, "chat");

  std::vector<std::string> artifacts;
  std::string prompt;
  ScriptSource source = ScriptSource::ClapPipeline;
  if (c.pipeline == PipelineKind::Clap) {
    ScriptPromptOptions opts;
    opts.additional_prompt = c.additional_prompt;
    opts.character_directive = directive(c);
    prompt = build_clap_script_prompt(bundle.track, bundle.segments, opts);
  } else {
    source = ScriptSource::LalmPipeline;
    StoryConcept story{story_locked(run_dir, m, backends, false), kInputFile};
    DecompositionOptions opts;
    opts.additional_prompt = c.additional_prompt;
    opts.character_directive = directive(c);
    if (!bundle.track.visual_style.empty()) opts.style_guideline_text = style_guideline_text(bundle.track);
    prompt = build_decomposition_prompt(story, plan, opts);
    artifacts = {kStory};
    if (fs::exists(run_dir / kStoryPrompt)) artifacts.push_back(kStoryPrompt);
  }

  const ChatTranscript transcript{run_dir / kScriptPrompt, run_dir / kRawResponse};
  for (int attempt = 0;; ++attempt) {
    ChatOptions opts{c.seed + static_cast<std::uint64_t>(attempt), c.temperature};
    std::optional<Error> failure;
    try {
      const std::string raw = request_script(prompt, chat, opts, transcript);
      const VideoScript script = parse_script(raw, plan.size(), source);
      const ValidationReport report = validate_script(script, plan);
      if (report.ok()) {
        write_json(run_dir / kValidation, to_json(report));
        write_json(run_dir / kParsedScript, to_json(script));
        artifacts.insert(artifacts.end(), {kScriptPrompt, kRawResponse, kParsedScript, kValidation});
        return artifacts;
      }
      failure.emplace(ErrorCode::EmptyScript, "script failed validation", to_json(report));
    } catch (const Error& e) {
      if (!is_script_error(e.code())) throw;
      failure = e;
    }
    std::error_code ec;
    if (attempt >= c.script_retries) {
      json details = failure->details().is_null() ? json::object() : failure->details();
      details["attempts"] = attempt + 1;
      throw Error(failure->code(), failure->what(), details);
    }
    if (fs::exists(run_dir / kRawResponse, ec)) {
      fs::rename(run_dir / kRawResponse, run_dir / ("scripts/raw_response.rejected_" + std::to_string(attempt) + ".txt"));
    }
  }
}

std::vector<std::string> do_generate(const fs::path& run_dir, const RunManifest& m, const BackendSet& backends) {
  const RunConfig& c = m.config;
  const SegmentPlan plan = load_plan(run_dir);
  VideoScript script = video_script_from_json(read_json(run_dir / kParsedScript, ErrorCode::IntegrityError));
  VideoBackend& video = require(backends.video, "video");

  // Clips from a longer earlier script would otherwise linger.
  for (const auto& entry : fs::directory_iterator(run_dir / "clips")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("scene_", 0) != 0) continue;
    const std::string num = name.substr(6);
    if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos ||
        std::stoul(num) > script.scenes.size()) {
      fs::remove_all(entry.path());
    }
  }

  GenerationSettings gs;
  gs.width = c.width;
  gs.height = c.height;
  gs.fps = c.fps;
  gs.policy = c.conform;
  gs.run_seed = c.seed;
  gs.max_concurrency = c.max_concurrency;
  const auto clips = generate_all(script, plan, "", video, gs, run_dir / "clips");
  std::vector<std::string> artifacts;
  for (const auto& clip : clips) artifacts.push_back("clips/scene_" + std::to_string(clip.scene_number));
  return artifacts;
}

std::vector<std::string> do_assemble(const fs::path& run_dir, const RunManifest& m) {
  const RunConfig& c = m.config;
  const VideoScript script = video_script_from_json(read_json(run_dir / kParsedScript, ErrorCode::IntegrityError));
  AssemblySpec spec;
  spec.expected_scenes = script.scenes.size();
  for (const auto& scene : script.scenes) spec.clips.push_back(load_clip(scene_dir(run_dir / "clips", scene.number)));
  spec.audio_path = run_dir / kInputFile;
  const std::string out = c.container == ContainerKind::Mp4ViaMuxer ? "output/final.mp4" : "output/final.manifest.json";
  spec.output_path = run_dir / out;
  spec.container = c.container;
  spec.muxer_command = c.muxer_command;
  spec.base_dir = run_dir;
  assemble_video(spec);
  return {out};
}

void check_prior_done(const RunManifest& m, Stage stage) {
  for (Stage s : kAllStages) {
    if (s == stage) break;
    if (m.at(s).status != StageStatus::Done) {
      throw Error(ErrorCode::StageOrder,
                  "stage " + std::string(to_string(stage)) + " needs " + std::string(to_string(s)) + " to be done",
                  {{"stage", to_string(stage)}, {"blocking", to_string(s)}});
    }
  }
}

void invalidate_locked(RunManifest& m, Stage from) {
  for (Stage s : kAllStages) {
    if (static_cast<int>(s) < static_cast<int>(from)) continue;
    m.at(s) = StageRecord{};
  }
}

RunManifest stage_locked(const fs::path& run_dir, RunManifest m, Stage stage, const BackendSet& backends,
                         const StageOptions& options) {
  check_integrity(run_dir, m);
  check_prior_done(m, stage);
  if (m.at(stage).status == StageStatus::Done) {
    if (!options.force) return m;
    invalidate_locked(m, stage);
  }
  try {
    std::vector<std::string> artifacts;
    switch (stage) {
      case Stage::Segment: artifacts = do_segment(run_dir, m); break;
      case Stage::Analyze: artifacts = do_analyze(run_dir, m, backends); break;
      case Stage::Script: artifacts = do_script(run_dir, m, backends); break;
      case Stage::Generate: artifacts = do_generate(run_dir, m, backends); break;
      case Stage::Assemble: artifacts = do_assemble(run_dir, m); break;
    }
    // A re-run of an earlier stage makes everything after it stale.
    invalidate_locked(m, stage);
    m.at(stage) = StageRecord{StageStatus::Done, std::move(artifacts), std::nullopt};
  } catch (const Error& e) {
    m.at(stage) = StageRecord{StageStatus::Failed, {}, e.to_json().at("error")};
    save_locked(run_dir, m);
    throw;
  } catch (const std::exception& e) {
    m.at(stage) = StageRecord{StageStatus::Failed, {}, json{{"code", "Internal"}, {"message", e.what()}}};
    save_locked(run_dir, m);
    throw;
  }
  save_locked(run_dir, m);
  return m;
}

RunManifest pipeline_locked(const fs::path& run_dir, RunManifest m, const BackendSet& backends,
                            std::optional<Stage> stop_after) {
  for (Stage s : kAllStages) {
    if (m.at(s).status != StageStatus::Done) m = stage_locked(run_dir, std::move(m), s, backends, {});
    if (stop_after && *stop_after == s) break;
  }
  return m;
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Segment: return "segment";
    case Stage::Analyze: return "analyze";
    case Stage::Script: return "script";
    case Stage::Generate: return "generate";
    case Stage::Assemble: return "assemble";
  }
  return "?";
}

Stage stage_from_string(std::string_view name) {
  for (Stage s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown stage: " + std::string(name));
}

std::string_view to_string(StageStatus status) {
  switch (status) {
    case StageStatus::Pending: return "pending";
    case StageStatus::Done: return "done";
    case StageStatus::Failed: return "failed";
  }
  return "?";
}

bool RunManifest::all_done() const {
  for (const auto& s : stages) {
    if (s.status != StageStatus::Done) return false;
  }
  return true;
}

json to_json(const RunManifest& m) {
  json stages = json::array();
  for (Stage s : kAllStages) {
    const StageRecord& r = m.at(s);
    json j = {{"stage", to_string(s)}, {"status", to_string(r.status)}, {"artifacts", r.artifacts}};
    if (r.error) j["error"] = *r.error;
    stages.push_back(std::move(j));
  }
  return {{"format", "mvgen-run/1"},
          {"run_id", m.run_id},
          {"created_at", m.created_at},
          {"pipeline", to_string(m.config.pipeline)},
          {"segmenter", m.config.segmenter == SegmentationMethod::Random ? "random" : "rules"},
          {"run_seed", m.config.seed},
          {"config", to_json(m.config)},
          {"config_hash", m.config_hash},
          {"input", {{"name", m.input_name}, {"path", kInputFile}, {"sha256", m.input_sha256}}},
          {"stages", stages}};
}

RunManifest run_manifest_from_json(const json& doc) {
  RunManifest m;
  try {
    m.run_id = doc.at("run_id").get<std::string>();
    m.created_at = doc.at("created_at").get<std::string>();
    m.config = run_config_from_json(doc.at("config"));
    m.config_hash = doc.at("config_hash").get<std::string>();
    m.input_name = doc.at("input").at("name").get<std::string>();
    m.input_sha256 = doc.at("input").at("sha256").get<std::string>();
    const json& stages = doc.at("stages");
    if (!stages.is_array() || stages.size() != kStageCount) throw Error(ErrorCode::ManifestCorrupt, "bad stage list");
    for (std::size_t i = 0; i < kStageCount; ++i) {
      const json& j = stages[i];
      if (j.at("stage").get<std::string>() != to_string(kAllStages[i])) {
        throw Error(ErrorCode::ManifestCorrupt, "stages out of order");
      }
      StageRecord r;
      const auto status = j.at("status").get<std::string>();
      if (status == "pending") {
        r.status = StageStatus::Pending;
      } else if (status == "done") {
        r.status = StageStatus::Done;
      } else if (status == "failed") {
        r.status = StageStatus::Failed;
      } else {
        throw Error(ErrorCode::ManifestCorrupt, "unknown stage status: " + status);
      }
      r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
      if (j.contains("error")) r.error = j.at("error");
      m.stages[i] = std::move(r);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ManifestCorrupt, std::string("malformed manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ManifestCorrupt) throw;
    throw Error(ErrorCode::ManifestCorrupt, std::string("malformed manifest: ") + e.what(), e.details());
  }
  if (config_hash(m.config) != m.config_hash) {
    throw Error(ErrorCode::ManifestCorrupt, "config snapshot does not match its hash");
  }
  return m;
}

RunLock::RunLock(const fs::path& run_dir) {
  const fs::path path = run_dir / ".lock";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open lock file " + path.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    const int err = errno;
    ::close(fd_);
    fd_ = -1;
    if (err == EWOULDBLOCK) throw Error(ErrorCode::LockHeld, "run directory is in use: " + run_dir.string());
    throw Error(ErrorCode::IoError, "cannot lock " + path.string());
  }
}

RunLock::~RunLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

RunManifest init_run(const RunConfig& config, const fs::path& input_audio, const fs::path& run_dir) {
  config.validate();
  std::error_code ec;
  if (fs::exists(run_dir, ec)) {
    if (!fs::is_directory(run_dir, ec) || !fs::is_empty(run_dir, ec)) {
      throw Error(ErrorCode::RunDirNotEmpty, "run directory exists and is not empty: " + run_dir.string());
    }
  }
  const std::string bytes = read_file(input_audio);
  decode_audio(bytes, config.analysis_rate);  // rejects unreadable or empty input up front

  fs::create_directories(run_dir);
  RunLock lock(run_dir);
  for (const char* d : kSubdirs) fs::create_directories(run_dir / d);
  write_file_atomic(run_dir / kInputFile, bytes);

  RunManifest m;
  m.config = config;
  m.config_hash = config_hash(config);
  m.input_name = input_audio.filename().string();
  m.input_sha256 = sha256_hex(bytes);
  m.run_id = sha256_hex(m.config_hash + m.input_sha256).substr(0, 16);
  m.created_at = now_iso8601();
  save_locked(run_dir, m);
  return m;
}

namespace {

// Existing-run entry points report a missing run as ManifestCorrupt rather
// than failing to create the lock file.
void require_run_dir(const fs::path& run_dir) {
  std::error_code ec;
  if (!fs::is_regular_file(run_dir / kManifestFile, ec)) {
    throw Error(ErrorCode::ManifestCorrupt, "not a run directory (no manifest.json): " + run_dir.string());
  }
}

}  // namespace

RunManifest load_manifest(const fs::path& run_dir) {
  return run_manifest_from_json(read_json(run_dir / kManifestFile, ErrorCode::ManifestCorrupt));
}

void save_manifest(const fs::path& run_dir, const RunManifest& manifest) { save_locked(run_dir, manifest); }

void check_integrity(const fs::path& run_dir, const RunManifest& m) {
  bool prefix = true;
  for (Stage s : kAllStages) {
    const StageRecord& r = m.at(s);
    if (r.status != StageStatus::Done) {
      prefix = false;
      continue;
    }
    if (!prefix) {
      throw Error(ErrorCode::StageOrder, "stage " + std::string(to_string(s)) + " is done but an earlier stage is not");
    }
    for (const auto& a : r.artifacts) {
      std::error_code ec;
      if (!fs::exists(run_dir / a, ec)) {
        throw Error(ErrorCode::IntegrityError,
                    "artifact of done stage " + std::string(to_string(s)) + " is missing: " + a,
                    {{"stage", to_string(s)}, {"artifact", a}});
      }
    }
  }
  std::error_code ec;
  if (!fs::is_regular_file(run_dir / kInputFile, ec) || sha256_hex(read_file(run_dir / kInputFile)) != m.input_sha256) {
    throw Error(ErrorCode::IntegrityError, "input.wav is missing or modified", {{"artifact", kInputFile}});
  }
}

RunManifest run_stage(const fs::path& run_dir, Stage stage, const BackendSet& backends, const StageOptions& options) {
  require_run_dir(run_dir);
  RunLock lock(run_dir);
  return stage_locked(run_dir, load_manifest(run_dir), stage, backends, options);
}

RunManifest run_pipeline(const fs::path& run_dir, const BackendSet& backends, std::optional<Stage> stop_after) {
  require_run_dir(run_dir);
  RunLock lock(run_dir);
  return pipeline_locked(run_dir, load_manifest(run_dir), backends, stop_after);
}

RunManifest resume_run(const fs::path& run_dir, const BackendSet& backends) {
  require_run_dir(run_dir);
  RunLock lock(run_dir);
  RunManifest m = load_manifest(run_dir);
  check_integrity(run_dir, m);
  if (m.all_done()) return m;
  return pipeline_locked(run_dir, std::move(m), backends, std::nullopt);
}

RunManifest invalidate_from(const fs::path& run_dir, Stage from) {
  require_run_dir(run_dir);
  RunLock lock(run_dir);
  RunManifest m = load_manifest(run_dir);
  invalidate_locked(m, from);
  save_locked(run_dir, m);
  return m;
}

std::string write_story(const fs::path& run_dir, const BackendSet& backends, bool force) {
  require_run_dir(run_dir);
  RunLock lock(run_dir);
  const RunManifest m = load_manifest(run_dir);
  if (m.config.pipeline != PipelineKind::Lalm) {
    throw Error(ErrorCode::StageOrder, "the story step belongs to the lalm pipeline");
  }
  check_integrity(run_dir, m);
  check_prior_done(m, Stage::Analyze);
  return story_locked(run_dir, m, backends, force);
}

}  // namespace mvgen
