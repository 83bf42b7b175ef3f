#include "mvgen/assembly/assembler.h"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "mvgen/audio/wav_io.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"

extern char** environ;

namespace mvgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSequencePattern = "frame_%06d.png";

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.generic_string();
  const fs::path rel = fs::absolute(p).lexically_normal().lexically_relative(fs::absolute(base).lexically_normal());
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

std::string format_fps(double fps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", fps);
  return buf;
}

std::string substitute(std::string arg, const std::string& key, const std::string& value) {
  for (std::size_t pos = arg.find(key); pos != std::string::npos; pos = arg.find(key, pos + value.size())) {
    arg.replace(pos, key.size(), value);
  }
  return arg;
}

// Order, presence and uniformity checks shared by both containers.
void check_clips(const AssemblySpec& spec) {
  const std::size_t expected = spec.expected_scenes ? spec.expected_scenes : spec.clips.size();
  if (spec.clips.empty()) {
    throw Error(ErrorCode::MissingClip, "no clips to assemble", {{"scene", 1}});
  }
  std::set<int> present;
  for (const auto& c : spec.clips) present.insert(c.scene_number);
  for (std::size_t n = 1; n <= expected; ++n) {
    if (!present.count(static_cast<int>(n))) {
      throw Error(ErrorCode::MissingClip, "missing clip for scene " + std::to_string(n), {{"scene", n}});
    }
  }
  for (std::size_t i = 0; i < spec.clips.size(); ++i) {
    const auto& c = spec.clips[i];
    if (c.scene_number != static_cast<int>(i + 1)) {
      throw Error(ErrorCode::InvalidArgument, "clips are not in scene order");
    }
    if (c.frame_count == 0) throw Error(ErrorCode::EmptyClip, "clip " + std::to_string(c.scene_number) + " is empty");
    if (c.fps != spec.clips.front().fps || c.width != spec.clips.front().width ||
        c.height != spec.clips.front().height) {
      throw Error(ErrorCode::InvalidArgument, "clips differ in fps or frame size");
    }
  }
}

double read_audio_duration(const fs::path& path) {
  const WavData wav = read_wav(path);
  return static_cast<double>(wav.frames()) / wav.sample_rate;
}

}  // namespace

std::string_view to_string(ContainerKind kind) {
  return kind == ContainerKind::Mp4ViaMuxer ? "mp4" : "manifest";
}

ContainerKind container_kind_from_string(std::string_view name) {
  if (name == "mp4") return ContainerKind::Mp4ViaMuxer;
  if (name == "manifest") return ContainerKind::ManifestOnly;
  throw Error(ErrorCode::ConfigInvalid, "unknown container: " + std::string(name));
}

std::vector<std::string> default_muxer_command() {
  return {"ffmpeg", "-y", "-loglevel", "error", "-framerate", "{fps}", "-i", "{frames_pattern}", "-i", "{audio}",
          "-map", "0:v", "-map", "1:a", "-c:v", "libx264", "-pix_fmt", "yuv420p", "-c:a", "copy", "{out}"};
}

json assembly_manifest(const AssemblySpec& spec, double audio_duration_s) {
  const double fps = spec.clips.front().fps;
  json clips = json::array();
  std::size_t start_frame = 0;
  for (const auto& c : spec.clips) {
    clips.push_back({{"scene", c.scene_number},
                     {"dir", relative_to(c.dir, spec.base_dir)},
                     {"frame_pattern", c.frame_pattern},
                     {"frame_count", c.frame_count},
                     {"start_frame", start_frame},
                     {"start_s", static_cast<double>(start_frame) / fps},
                     {"duration_s", c.duration_s()}});
    start_frame += c.frame_count;
  }
  return {{"format", "mvgen-assembly/1"},
          {"fps", fps},
          {"width", spec.clips.front().width},
          {"height", spec.clips.front().height},
          {"audio", relative_to(spec.audio_path, spec.base_dir)},
          {"audio_duration_s", audio_duration_s},
          {"frame_count", start_frame},
          {"video_duration_s", static_cast<double>(start_frame) / fps},
          {"clips", clips}};
}

std::optional<fs::path> find_executable(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) {
    return ::access(name.c_str(), X_OK) == 0 ? std::optional<fs::path>(name) : std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::string_view rest(path);
  while (true) {
    const auto colon = rest.find(':');
    const std::string dir(rest.substr(0, colon));
    const fs::path candidate = fs::path(dir.empty() ? "." : dir) / name;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate;
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  return std::nullopt;
}

AssemblyResult assemble_video(const AssemblySpec& spec) {
  check_clips(spec);
  const double fps = spec.clips.front().fps;
  const double audio_s = spec.audio_duration_s ? *spec.audio_duration_s : read_audio_duration(spec.audio_path);

  AssemblyResult result;
  result.output_path = spec.output_path;
  result.audio_duration_s = audio_s;
  for (const auto& c : spec.clips) result.frame_count += c.frame_count;
  result.video_duration_s = static_cast<double>(result.frame_count) / fps;

  const double tolerance = static_cast<double>(spec.clips.size()) / fps + 1e-9;
  if (std::abs(result.video_duration_s - audio_s) > tolerance) {
    throw Error(ErrorCode::DurationMismatch, "video and audio durations differ beyond tolerance",
                {{"video_s", result.video_duration_s}, {"audio_s", audio_s}, {"tolerance_s", tolerance}});
  }

  if (spec.container == ContainerKind::ManifestOnly) {
    write_file_atomic(spec.output_path, assembly_manifest(spec, audio_s).dump(2) + "\n");
    return result;
  }

  if (spec.muxer_command.empty() || !find_executable(spec.muxer_command.front())) {
    throw Error(ErrorCode::MuxerUnavailable,
                "muxer '" + (spec.muxer_command.empty() ? std::string() : spec.muxer_command.front()) +
                    "' not found; use the manifest container instead");
  }

  // One continuous numbered sequence across all clips, hard-linked where possible.
  const fs::path seq_dir = spec.output_path.parent_path() / ".frames";
  fs::remove_all(seq_dir);
  fs::create_directories(seq_dir);
  std::size_t k = 0;
  for (const auto& c : spec.clips) {
    for (std::size_t i = 0; i < c.frame_count; ++i, ++k) {
      char name[32];
      std::snprintf(name, sizeof name, kSequencePattern, static_cast<int>(k));
      std::error_code ec;
      fs::create_hard_link(c.frame_path(i), seq_dir / name, ec);
      if (ec) fs::copy_file(c.frame_path(i), seq_dir / name, fs::copy_options::overwrite_existing);
    }
  }

  std::vector<std::string> args;
  for (const auto& a : spec.muxer_command) {
    std::string s = substitute(a, "{frames_pattern}", (seq_dir / kSequencePattern).string());
    s = substitute(s, "{fps}", format_fps(fps));
    s = substitute(s, "{audio}", spec.audio_path.string());
    s = substitute(s, "{out}", spec.output_path.string());
    args.push_back(std::move(s));
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  fs::create_directories(spec.output_path.parent_path());
  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, argv[0], nullptr, nullptr, argv.data(), environ);
  if (rc != 0) {
    fs::remove_all(seq_dir);
    throw Error(ErrorCode::MuxerUnavailable, "cannot start muxer '" + args.front() + "'");
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  fs::remove_all(seq_dir);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::MuxerFailed, "muxer exited with failure",
                {{"exit_status", WIFEXITED(status) ? WEXITSTATUS(status) : -1}, {"argv", args}});
  }
  std::error_code ec;
  if (!fs::is_regular_file(spec.output_path, ec)) {
    throw Error(ErrorCode::MuxerFailed, "muxer produced no output at " + spec.output_path.string());
  }
  return result;
}

}  // namespace mvgen
