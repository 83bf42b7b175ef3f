#pragma once

/// @file error.h
/// @brief Typed error used across the pipeline.

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace mvgen {

enum class ErrorCode {
  InvalidArgument,
  IoError,
  UnsupportedFormat,
  ZeroLength,
  OutOfRange,
  BufferTooShort,
  NoBeats,
  EmptyCategory,
  BackendTransport,
  BackendMalformed,
  EmptyResponse,
  MissingBeginMarker,
  SceneCountMismatch,
  NonContiguousNumbering,
  EmptyScript,
  MalformedClip,
  EmptyClip,
  MissingClip,
  MuxerUnavailable,
  MuxerFailed,
  DurationMismatch,
  GenerationFailed,
  RunDirNotEmpty,
  ManifestCorrupt,
  IntegrityError,
  StageOrder,
  LockHeld,
  ConfigInvalid,
};

std::string_view error_code_name(ErrorCode code);

/// Exception carrying a stable code and optional structured details.
/// The CLI serializes these as `{"error": {"code", "message", "details"}}`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, nlohmann::json details = nullptr)
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

  nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

#define MVGEN_CHECK(cond, code, msg)          \
  do {                                        \
    if (!(cond)) {                            \
      throw ::mvgen::Error((code), (msg));    \
    }                                         \
  } while (0)

}  // namespace mvgen
