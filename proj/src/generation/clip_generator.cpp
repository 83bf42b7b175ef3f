#include "mvgen/generation/clip_generator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "mvgen/generation/image_io.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"
#include "mvgen/util/hashing.h"

namespace mvgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kClipManifest = "clip.json";

std::string frame_name(const std::string& pattern, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern.c_str(), static_cast<int>(i));
  return buf;
}

// Writes frames and clip.json into a temp sibling, then swaps it into place.
ClipArtifact write_clip_dir(ClipArtifact meta, const std::vector<Frame>& frames, const fs::path& clips_dir) {
  const fs::path final_dir = scene_dir(clips_dir, meta.scene_number);
  const fs::path tmp = clips_dir / (".scene_" + std::to_string(meta.scene_number) + ".tmp");
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  meta.dir = tmp;
  meta.frame_count = frames.size();
  std::string prev_png;
  const Frame* prev = nullptr;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!prev || prev->rgb != frames[i].rgb) prev_png = encode_png(frames[i]);
    prev = &frames[i];
    write_file_atomic(meta.frame_path(i), prev_png);
  }
  write_file_atomic(tmp / kClipManifest, to_json(meta).dump(2) + "\n");
  fs::remove_all(final_dir);
  fs::rename(tmp, final_dir);
  meta.dir = final_dir;
  return meta;
}

}  // namespace

std::string_view to_string(ConformPolicy policy) {
  return policy == ConformPolicy::HoldLastFrame ? "hold_last_frame" : "trim_end";
}

ConformPolicy conform_policy_from_string(std::string_view name) {
  if (name == "trim_end") return ConformPolicy::TrimEnd;
  if (name == "hold_last_frame") return ConformPolicy::HoldLastFrame;
  throw Error(ErrorCode::ConfigInvalid, "unknown conform policy: " + std::string(name));
}

fs::path ClipArtifact::frame_path(std::size_t i) const { return dir / frame_name(frame_pattern, i); }

std::size_t target_frame_count(double duration_s, double fps) {
  MVGEN_CHECK(duration_s > 0.0 && fps > 0.0, ErrorCode::InvalidArgument, "duration and fps must be positive");
  return static_cast<std::size_t>(std::max(1LL, std::llround(duration_s * fps)));
}

fs::path scene_dir(const fs::path& clips_dir, int scene_number) {
  return clips_dir / ("scene_" + std::to_string(scene_number));
}

void check_payload(const VideoPayload& payload, const VideoRequest& request) {
  if (payload.frames.empty()) throw Error(ErrorCode::MalformedClip, "backend returned zero frames");
  if (!(payload.fps > 0.0)) throw Error(ErrorCode::MalformedClip, "backend returned a non-positive fps");
  if (std::abs(payload.fps - request.fps) > 1e-6) {
    throw Error(ErrorCode::MalformedClip, "backend ignored the requested fps",
                {{"requested", request.fps}, {"returned", payload.fps}});
  }
  for (const Frame& f : payload.frames) {
    if (f.width != payload.width || f.height != payload.height ||
        f.rgb.size() != static_cast<std::size_t>(f.width) * f.height * 3 || f.width <= 0 || f.height <= 0) {
      throw Error(ErrorCode::MalformedClip, "frames are not uniform in size");
    }
  }
}

void conform_frames(std::vector<Frame>& frames, std::size_t target, [[maybe_unused]] ConformPolicy policy) {
  if (frames.empty()) throw Error(ErrorCode::EmptyClip, "cannot conform an empty clip");
  MVGEN_CHECK(target > 0, ErrorCode::InvalidArgument, "conform target must be positive");
  if (frames.size() > target) {
    frames.resize(target);
  } else if (frames.size() < target) {
    const Frame last = frames.back();
    frames.resize(target, last);
  }
}

ClipArtifact generate_clip(const ClipRequest& request, VideoBackend& backend, const fs::path& clips_dir) {
  MVGEN_CHECK(request.duration_s > 0.0 && request.fps > 0.0 && request.width > 0 && request.height > 0,
              ErrorCode::InvalidArgument, "clip request needs positive duration, fps and size");
  const VideoRequest vr{request.prompt_text, request.duration_s, request.width, request.height, request.fps,
                        request.seed};
  const VideoPayload payload = backend.generate(vr);
  check_payload(payload, vr);
  ClipArtifact meta;
  meta.scene_number = request.scene_number;
  meta.fps = payload.fps;
  meta.width = payload.width;
  meta.height = payload.height;
  meta.prompt_sha256 = sha256_hex(request.prompt_text);
  meta.seed = request.seed;
  fs::create_directories(clips_dir);
  return write_clip_dir(meta, payload.frames, clips_dir);
}

ClipArtifact conform_clip(const ClipArtifact& clip, double target_duration_s,
                          [[maybe_unused]] ConformPolicy policy) {
  if (clip.frame_count == 0) throw Error(ErrorCode::EmptyClip, "cannot conform an empty clip");
  const std::size_t target = target_frame_count(target_duration_s, clip.fps);
  ClipArtifact out = clip;
  if (target < clip.frame_count) {
    for (std::size_t i = target; i < clip.frame_count; ++i) fs::remove(clip.frame_path(i));
  } else if (target > clip.frame_count) {
    const std::string last = read_file(clip.frame_path(clip.frame_count - 1));
    for (std::size_t i = clip.frame_count; i < target; ++i) write_file_atomic(clip.frame_path(i), last);
  }
  out.frame_count = target;
  write_file_atomic(out.dir / kClipManifest, to_json(out).dump(2) + "\n");
  return out;
}

json to_json(const ClipArtifact& clip) {
  return {{"scene_number", clip.scene_number}, {"frame_count", clip.frame_count},
          {"fps", clip.fps},                   {"width", clip.width},
          {"height", clip.height},             {"frame_pattern", clip.frame_pattern},
          {"prompt_sha256", clip.prompt_sha256}, {"seed", clip.seed},
          {"duration_s", clip.duration_s()}};
}

ClipArtifact load_clip(const fs::path& dir) {
  const fs::path manifest = dir / kClipManifest;
  std::error_code ec;
  if (!fs::is_regular_file(manifest, ec)) throw Error(ErrorCode::MissingClip, "no clip at " + dir.string());
  auto doc = json::parse(read_file(manifest), nullptr, false);
  ClipArtifact c;
  try {
    c.scene_number = doc.at("scene_number").get<int>();
    c.frame_count = doc.at("frame_count").get<std::size_t>();
    c.fps = doc.at("fps").get<double>();
    c.width = doc.at("width").get<int>();
    c.height = doc.at("height").get<int>();
    c.frame_pattern = doc.at("frame_pattern").get<std::string>();
    c.prompt_sha256 = doc.at("prompt_sha256").get<std::string>();
    c.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedClip, "bad clip manifest in " + dir.string() + ": " + e.what());
  }
  c.dir = dir;
  const auto pct = c.frame_pattern.find('%');
  if (pct == std::string::npos || c.frame_pattern.compare(pct, 4, "%05d") != 0 ||
      c.frame_pattern.find('%', pct + 1) != std::string::npos || c.frame_pattern.find('/') != std::string::npos) {
    throw Error(ErrorCode::MalformedClip, "unsupported frame pattern in " + dir.string());
  }
  if (c.frame_count == 0) throw Error(ErrorCode::EmptyClip, "clip has no frames: " + dir.string());
  for (std::size_t i = 0; i < c.frame_count; ++i) {
    if (!fs::is_regular_file(c.frame_path(i), ec)) {
      throw Error(ErrorCode::MalformedClip, "missing frame " + c.frame_path(i).string());
    }
  }
  return c;
}

std::string scene_prompt(const Scene& scene, std::string_view style_text) {
  std::string p = scene.description;
  const auto b = style_text.find_first_not_of(" \t\r\n");
  if (b != std::string_view::npos) {
    const auto e = style_text.find_last_not_of(" \t\r\n");
    p += " " + std::string(style_text.substr(b, e - b + 1));
  }
  return p;
}

std::vector<ClipArtifact> generate_all(const VideoScript& script, const SegmentPlan& plan, std::string_view style_text,
                                       VideoBackend& backend, const GenerationSettings& settings,
                                       const fs::path& clips_dir) {
  if (script.scenes.empty()) throw Error(ErrorCode::EmptyScript, "script has no scenes");
  if (script.scenes.size() != plan.segments.size()) {
    throw Error(ErrorCode::InvalidArgument, "script and segment plan differ in length",
                {{"scenes", script.scenes.size()}, {"segments", plan.segments.size()}});
  }
  fs::create_directories(clips_dir);
  const std::size_t n = script.scenes.size();
  std::vector<ClipArtifact> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto work = [&](std::size_t i) {
    const Scene& scene = script.scenes[i];
    VideoRequest req;
    req.prompt = scene_prompt(scene, style_text);
    req.duration_s = plan.segments[i].duration();
    req.width = settings.width;
    req.height = settings.height;
    req.fps = settings.fps;
    req.seed = settings.run_seed + static_cast<std::uint64_t>(scene.number);
    const std::size_t target = target_frame_count(req.duration_s, req.fps);
    const std::string prompt_hash = sha256_hex(req.prompt);

    const fs::path dir = scene_dir(clips_dir, scene.number);
    std::error_code ec;
    if (fs::exists(dir / kClipManifest, ec)) {
      try {
        ClipArtifact existing = load_clip(dir);
        if (existing.prompt_sha256 == prompt_hash && existing.seed == req.seed && existing.fps == req.fps &&
            existing.width == req.width && existing.height == req.height && existing.frame_count == target) {
          out[i] = std::move(existing);
          return;
        }
      } catch (const Error&) {
        // Unusable leftovers are regenerated below.
      }
    }

    VideoPayload payload = backend.generate(req);
    check_payload(payload, req);
    conform_frames(payload.frames, target, settings.policy);
    ClipArtifact meta;
    meta.scene_number = scene.number;
    meta.fps = payload.fps;
    meta.width = payload.width;
    meta.height = payload.height;
    meta.prompt_sha256 = prompt_hash;
    meta.seed = req.seed;
    out[i] = write_clip_dir(meta, payload.frames, clips_dir);
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, settings.max_concurrency)), 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  json failed = json::array();
  std::string scenes;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    std::string code = "Unknown";
    std::string message;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      code = std::string(error_code_name(e.code()));
      message = e.what();
    } catch (const std::exception& e) {
      message = e.what();
    }
    failed.push_back({{"scene", script.scenes[i].number}, {"code", code}, {"message", message}});
    scenes += (scenes.empty() ? "" : ", ") + std::to_string(script.scenes[i].number);
  }
  if (!failed.empty()) {
    throw Error(ErrorCode::GenerationFailed, "clip generation failed for scene(s) " + scenes, {{"failed", failed}});
  }
  return out;
}

}  // namespace mvgen
