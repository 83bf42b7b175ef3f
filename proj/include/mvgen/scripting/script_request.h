#pragma once

/// @file script_request.h
/// @brief Backend calls that leave an audit trail on disk.

#include <filesystem>
#include <string>

#include "mvgen/backends/protocol.h"

namespace mvgen {

struct ChatTranscript {
  std::filesystem::path prompt_path;    ///< written before the request is sent
  std::filesystem::path response_path;  ///< written when a non-empty response arrives
};

/// Sends `prompt` as a single user message. Errors: transport errors from the
/// backend; EmptyResponse when the reply is empty or whitespace only.
std::string request_script(const std::string& prompt, ChatBackend& backend, const ChatOptions& options,
                           const ChatTranscript& transcript);

/// Same for an arbitrary conversation; `prompt_text` is what gets persisted.
std::string request_chat(const Conversation& conversation, const std::string& prompt_text, ChatBackend& backend,
                         const ChatOptions& options, const ChatTranscript& transcript);

}  // namespace mvgen
