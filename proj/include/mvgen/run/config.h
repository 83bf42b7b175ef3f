#pragma once

/// @file config.h
/// @brief Run configuration: a JSON document plus flag overrides, hashed canonically.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mvgen/assembly/assembler.h"
#include "mvgen/backends/protocol.h"
#include "mvgen/generation/clip_generator.h"
#include "mvgen/segmentation/types.h"

namespace mvgen {

enum class PipelineKind { Clap, Lalm };
std::string_view to_string(PipelineKind kind);
PipelineKind pipeline_kind_from_string(std::string_view name);

struct RunConfig {
  PipelineKind pipeline = PipelineKind::Clap;
  SegmentationMethod segmenter = SegmentationMethod::RuleBased;
  std::uint64_t seed = 0;
  bool mock = false;

  // Backend endpoints; all must be empty when mock is set.
  std::string embed_url;
  std::string chat_url;
  std::string chat_audio_url;
  std::string video_url;
  double timeout_s = 120.0;
  int max_retries = 2;

  int width = 512;
  int height = 512;
  double fps = 12.0;
  ConformPolicy conform = ConformPolicy::TrimEnd;

  std::string taxonomy_path;  ///< empty selects the built-in taxonomy
  ContainerKind container = ContainerKind::ManifestOnly;
  std::vector<std::string> muxer_command = default_muxer_command();

  int script_retries = 2;  ///< extra attempts when the script is unusable
  int analysis_rate = 22050;
  SegmentationConfig segmentation;  ///< its seed is ignored; runs use `seed`

  std::optional<std::string> additional_prompt;
  std::string character_directive;  ///< empty selects the animal-character line
  double temperature = 0.0;
  int max_concurrency = 4;

  /// Every problem found, empty when valid.
  std::vector<std::string> problems() const;
  /// Errors: ConfigInvalid with details {"problems": [...]}.
  void validate() const;
  /// Segmentation settings with the run seed applied.
  SegmentationConfig segmentation_config() const;
};

/// Keys that only affect how backends are reached, never artifact bytes.
const std::vector<std::string>& transport_config_keys();

nlohmann::json to_json(const RunConfig& config);
/// Applies the keys present in `doc` on top of `base`. Unknown keys and type
/// errors are collected and reported together. Errors: ConfigInvalid.
RunConfig run_config_from_json(const nlohmann::json& doc, const RunConfig& base = {});
/// Reads a JSON config file. Errors: IoError, ConfigInvalid.
RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base = {});

/// Sorted-key compact JSON; equal configs give equal bytes.
std::string canonical_config(const RunConfig& config);
/// SHA-256 of canonical_config.
std::string config_hash(const RunConfig& config);

/// Mocks seeded with config.seed, or HTTP clients for the configured URLs
/// (auth token from the environment). Unconfigured kinds stay null.
BackendSet make_backends(const RunConfig& config);

}  // namespace mvgen
