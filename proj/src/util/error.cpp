#include "mvgen/util/error.h"

namespace mvgen {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::ZeroLength: return "ZeroLength";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BufferTooShort: return "BufferTooShort";
    case ErrorCode::NoBeats: return "NoBeats";
    case ErrorCode::EmptyCategory: return "EmptyCategory";
    case ErrorCode::BackendTransport: return "BackendTransport";
    case ErrorCode::BackendMalformed: return "BackendMalformed";
    case ErrorCode::EmptyResponse: return "EmptyResponse";
    case ErrorCode::MissingBeginMarker: return "MissingBeginMarker";
    case ErrorCode::SceneCountMismatch: return "SceneCountMismatch";
    case ErrorCode::NonContiguousNumbering: return "NonContiguousNumbering";
    case ErrorCode::EmptyScript: return "EmptyScript";
    case ErrorCode::MalformedClip: return "MalformedClip";
    case ErrorCode::EmptyClip: return "EmptyClip";
    case ErrorCode::MissingClip: return "MissingClip";
    case ErrorCode::MuxerUnavailable: return "MuxerUnavailable";
    case ErrorCode::MuxerFailed: return "MuxerFailed";
    case ErrorCode::DurationMismatch: return "DurationMismatch";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::RunDirNotEmpty: return "RunDirNotEmpty";
    case ErrorCode::ManifestCorrupt: return "ManifestCorrupt";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::StageOrder: return "StageOrder";
    case ErrorCode::LockHeld: return "LockHeld";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

nlohmann::json Error::to_json() const {
  nlohmann::json err = {{"code", std::string(error_code_name(code_))}, {"message", what()}};
  if (!details_.is_null()) err["details"] = details_;
  return {{"error", err}};
}

}  // namespace mvgen
