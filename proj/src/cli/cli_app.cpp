#include "mvgen/cli/cli_app.h"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvgen/backends/mock_backends.h"
#include "mvgen/backends/mock_server.h"
#include "mvgen/run/config.h"
#include "mvgen/run/run_manager.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"
#include "mvgen/util/hashing.h"

namespace mvgen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Binding {
  std::string key;
  CLI::Option* option;
  std::function<json()> value;
};

// Storage shared by every subcommand; each subcommand records its own options.
struct Flags {
  std::string config_path;
  std::string pipeline, segmenter, conform, container, muxer_command, taxonomy;
  std::string embed_url, chat_url, chat_audio_url, video_url;
  std::string additional_prompt, character_directive;
  std::uint64_t seed = 0;
  int width = 0, height = 0, script_retries = 0, max_retries = 0, max_concurrency = 0;
  double fps = 0.0, timeout_s = 0.0, temperature = 0.0;
  bool mock = false;
  bool json_output = false;
  bool force = false;
  std::map<const CLI::App*, std::vector<Binding>> bindings;
  std::map<const CLI::App*, CLI::Option*> config_options;
};

std::vector<std::string> split_command(const std::string& text) {
  if (!text.empty() && text.front() == '[') {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) {
      throw Error(ErrorCode::ConfigInvalid, "muxer command must be a JSON array of strings or a plain word list");
    }
    return doc.get<std::vector<std::string>>();
  }
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

void add_json_flag(CLI::App* app, Flags& f) {
  app->add_flag("--json", f.json_output, "Machine-readable output and errors");
}

void add_config_options(CLI::App* app, Flags& f) {
  auto& b = f.bindings[app];
  auto str = [&](const char* flag, const char* key, std::string& field, const char* help) {
    b.push_back({key, app->add_option(flag, field, help), [&field] { return json(field); }});
  };
  f.config_options[app] = app->add_option("--config", f.config_path, "JSON config file (flags override it)");
  str("--pipeline", "pipeline", f.pipeline, "clap or lalm");
  str("--segmenter", "segmenter", f.segmenter, "random or rules");
  str("--embed-url", "embed_url", f.embed_url, "Embedding backend base URL");
  str("--chat-url", "chat_url", f.chat_url, "Chat backend base URL");
  str("--chat-audio-url", "chat_audio_url", f.chat_audio_url, "Audio chat backend base URL");
  str("--video-url", "video_url", f.video_url, "Video backend base URL");
  str("--taxonomy", "taxonomy_path", f.taxonomy, "Label taxonomy JSON file");
  str("--conform", "conform", f.conform, "trim_end or hold_last_frame");
  str("--container", "container", f.container, "manifest or mp4");
  str("--additional-prompt", "additional_prompt", f.additional_prompt, "Extra instruction for the script prompt");
  str("--character-directive", "character_directive", f.character_directive, "Character line of the script prompt");
  b.push_back({"muxer_command", app->add_option("--muxer-command", f.muxer_command, "Muxer argv template"),
               [&f] { return json(split_command(f.muxer_command)); }});
  b.push_back({"seed", app->add_option("--seed", f.seed, "Run seed"), [&f] { return json(f.seed); }});
  b.push_back({"mock", app->add_flag("--mock", f.mock, "Use deterministic offline backends"),
               [&f] { return json(f.mock); }});
  b.push_back({"width", app->add_option("--width", f.width, "Clip width"), [&f] { return json(f.width); }});
  b.push_back({"height", app->add_option("--height", f.height, "Clip height"), [&f] { return json(f.height); }});
  b.push_back({"fps", app->add_option("--fps", f.fps, "Clip frame rate"), [&f] { return json(f.fps); }});
  b.push_back({"script_retries", app->add_option("--retries", f.script_retries, "Extra script attempts"),
               [&f] { return json(f.script_retries); }});
  b.push_back({"max_retries", app->add_option("--max-retries", f.max_retries, "HTTP retries per request"),
               [&f] { return json(f.max_retries); }});
  b.push_back({"timeout_s", app->add_option("--timeout", f.timeout_s, "HTTP timeout in seconds"),
               [&f] { return json(f.timeout_s); }});
  b.push_back({"temperature", app->add_option("--temperature", f.temperature, "Chat sampling temperature"),
               [&f] { return json(f.temperature); }});
  b.push_back({"max_concurrency", app->add_option("--max-concurrency", f.max_concurrency, "Worker threads"),
               [&f] { return json(f.max_concurrency); }});
}

json overrides_for(const CLI::App* app, const Flags& f) {
  json o = json::object();
  const auto it = f.bindings.find(app);
  if (it == f.bindings.end()) return o;
  for (const auto& b : it->second) {
    if (b.option->count() > 0) o[b.key] = b.value();
  }
  return o;
}

RunConfig config_for_new_run(const CLI::App* app, const Flags& f) {
  RunConfig base;
  const auto opt = f.config_options.find(app);
  if (opt != f.config_options.end() && opt->second->count() > 0) base = load_run_config(f.config_path);
  RunConfig c = run_config_from_json(overrides_for(app, f), base);
  c.validate();
  return c;
}

// Stage commands reuse the run's snapshot; only transport settings may differ.
RunConfig config_for_existing_run(const CLI::App* app, const Flags& f, const RunManifest& m) {
  RunConfig c = m.config;
  const auto opt = f.config_options.find(app);
  if (opt != f.config_options.end() && opt->second->count() > 0) c = load_run_config(f.config_path, c);
  c = run_config_from_json(overrides_for(app, f), c);
  const json now = to_json(c);
  const json snap = to_json(m.config);
  const auto& transport = transport_config_keys();
  std::vector<std::string> problems;
  for (const auto& [key, value] : now.items()) {
    if (std::find(transport.begin(), transport.end(), key) != transport.end()) continue;
    if (snap.at(key) != value) problems.push_back(key + " differs from the run snapshot; start a new run to change it");
  }
  if (!problems.empty()) throw Error(ErrorCode::ConfigInvalid, "configuration conflicts with the run", {{"problems", problems}});
  c.validate();
  return c;
}

json summary(const std::string& command, const fs::path& run_dir, const RunManifest& m) {
  json stages = json::object();
  for (Stage s : kAllStages) stages[std::string(to_string(s))] = to_string(m.at(s).status);
  json j = {{"command", command}, {"run_dir", run_dir.string()}, {"run_id", m.run_id}, {"stages", stages}};
  const auto& assemble = m.at(Stage::Assemble);
  if (assemble.status == StageStatus::Done && !assemble.artifacts.empty()) {
    j["output"] = (run_dir / assemble.artifacts.front()).string();
  }
  return j;
}

void print_summary(std::ostream& out, bool as_json, const json& s) {
  if (as_json) {
    out << s.dump() << "\n";
    return;
  }
  out << "run " << s.at("run_id").get<std::string>() << " in " << s.at("run_dir").get<std::string>() << "\n";
  for (Stage st : kAllStages) {
    const std::string name(to_string(st));
    out << "  " << name << ": " << s.at("stages").at(name).get<std::string>() << "\n";
  }
  if (s.contains("output")) out << "output: " << s.at("output").get<std::string>() << "\n";
}

void print_error(std::ostream& err, bool as_json, const Error& e) {
  if (as_json) {
    err << e.to_json().dump() << "\n";
    return;
  }
  err << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
  if (e.details().is_object() && e.details().contains("problems")) {
    for (const auto& p : e.details().at("problems")) err << "  - " << p.get<std::string>() << "\n";
  }
}

fs::path default_run_dir(const fs::path& audio) { return audio.parent_path() / (audio.stem().string() + ".mvgen"); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Automatic music video generation from a song"};
  app.require_subcommand(1);
  add_json_flag(&app, f);

  std::string audio, run_dir_arg, output_dir, stop_after;
  int port = 8765;
  std::string host = "127.0.0.1";

  auto* run = app.add_subcommand("run", "Run every stage on a song");
  run->add_option("audio", audio, "Input WAV file")->required();
  run->add_option("-o,--output", output_dir, "Run directory (absent or empty)")->required();
  run->add_option("--stop-after", stop_after, "Stop after this stage");
  add_config_options(run, f);
  add_json_flag(run, f);

  auto* segment = app.add_subcommand("segment", "Create a run directory and segment the song");
  segment->add_option("audio", audio, "Input WAV file")->required();
  segment->add_option("-o,--output", output_dir, "Run directory (default <stem>.mvgen next to the input)");
  segment->add_flag("--force", f.force, "Re-run a finished stage");
  add_config_options(segment, f);
  add_json_flag(segment, f);

  struct StageCommand {
    const char* name;
    const char* help;
    Stage stage;
    CLI::App* app = nullptr;
  };
  std::vector<StageCommand> stage_commands = {
      {"analyze", "Label the track and each segment", Stage::Analyze},
      {"script", "Write the scene script", Stage::Script},
      {"render", "Generate one clip per scene", Stage::Generate},
      {"assemble", "Join the clips over the original audio", Stage::Assemble},
  };
  for (auto& sc : stage_commands) {
    sc.app = app.add_subcommand(sc.name, sc.help);
    sc.app->add_option("run_dir", run_dir_arg, "Run directory")->required();
    sc.app->add_flag("--force", f.force, "Re-run a finished stage");
    add_config_options(sc.app, f);
    add_json_flag(sc.app, f);
  }

  auto* story = app.add_subcommand("story", "Write the story for a lalm run");
  story->add_option("run_dir", run_dir_arg, "Run directory")->required();
  story->add_flag("--force", f.force, "Replace an existing story");
  add_config_options(story, f);
  add_json_flag(story, f);

  auto* resume = app.add_subcommand("resume", "Finish the unfinished stages of a run");
  resume->add_option("run_dir", run_dir_arg, "Run directory")->required();
  add_config_options(resume, f);
  add_json_flag(resume, f);

  auto* serve = app.add_subcommand("serve-mock", "Serve the mock backends over HTTP");
  serve->add_option("--port", port, "Port to listen on");
  serve->add_option("--host", host, "Address to bind");
  serve->add_option("--seed", f.seed, "Mock seed");
  add_json_flag(serve, f);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      const RunConfig config = config_for_new_run(run, f);
      std::optional<Stage> stop;
      if (!stop_after.empty()) {
        try {
          stop = stage_from_string(stop_after);
        } catch (const Error&) {
          throw Error(ErrorCode::ConfigInvalid, "unknown stage for --stop-after: " + stop_after,
                      {{"problems", {"stop_after must be one of segment, analyze, script, generate, assemble"}}});
        }
      }
      const fs::path dir(output_dir);
      init_run(config, audio, dir);
      const RunManifest m = run_pipeline(dir, make_backends(config), stop);
      print_summary(out, f.json_output, summary("run", dir, m));
      return kExitOk;
    }
    if (segment->parsed()) {
      const fs::path dir = output_dir.empty() ? default_run_dir(audio) : fs::path(output_dir);
      RunConfig config;
      std::error_code ec;
      if (fs::exists(dir / kManifestFile, ec)) {
        const RunManifest existing = load_manifest(dir);
        if (sha256_hex(read_file(audio)) != existing.input_sha256) {
          throw Error(ErrorCode::RunDirNotEmpty, "run directory holds a different input: " + dir.string());
        }
        config = config_for_existing_run(segment, f, existing);
      } else {
        config = config_for_new_run(segment, f);
        init_run(config, audio, dir);
      }
      StageOptions opts;
      opts.force = f.force;
      const RunManifest m = run_stage(dir, Stage::Segment, make_backends(config), opts);
      if (f.json_output) {
        json s = summary("segment", dir, m);
        s["segments"] = json::parse(read_file(dir / "segments/segments.json"));
        out << s.dump() << "\n";
      } else {
        out << read_file(dir / "segments/segments.txt");
      }
      return kExitOk;
    }
    for (const auto& sc : stage_commands) {
      if (!sc.app->parsed()) continue;
      const fs::path dir(run_dir_arg);
      const RunConfig config = config_for_existing_run(sc.app, f, load_manifest(dir));
      StageOptions opts;
      opts.force = f.force;
      const RunManifest m = run_stage(dir, sc.stage, make_backends(config), opts);
      print_summary(out, f.json_output, summary(sc.name, dir, m));
      return kExitOk;
    }
    if (story->parsed()) {
      const fs::path dir(run_dir_arg);
      const RunConfig config = config_for_existing_run(story, f, load_manifest(dir));
      const std::string text = write_story(dir, make_backends(config), f.force);
      if (f.json_output) {
        out << json{{"command", "story"}, {"run_dir", dir.string()}, {"story", text}}.dump() << "\n";
      } else {
        out << text << (text.empty() || text.back() == '\n' ? "" : "\n");
      }
      return kExitOk;
    }
    if (resume->parsed()) {
      const fs::path dir(run_dir_arg);
      const RunConfig config = config_for_existing_run(resume, f, load_manifest(dir));
      const RunManifest m = resume_run(dir, make_backends(config));
      print_summary(out, f.json_output, summary("resume", dir, m));
      return kExitOk;
    }
    if (serve->parsed()) {
      MockServer server(make_mock_backends(f.seed), host);
      out << "serving mock backends on http://" << host << ":" << port << std::endl;
      server.serve_forever(port);
      return kExitOk;
    }
  } catch (const Error& e) {
    print_error(err, f.json_output, e);
    return e.code() == ErrorCode::ConfigInvalid ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    if (f.json_output) {
      err << json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump() << "\n";
    } else {
      err << "error [Internal]: " << e.what() << "\n";
    }
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace mvgen
