#include "mvgen/scripting/script_request.h"

#include "mvgen/util/error.h"
#include "mvgen/util/files.h"

namespace mvgen {

std::string request_chat(const Conversation& conversation, const std::string& prompt_text, ChatBackend& backend,
                         const ChatOptions& options, const ChatTranscript& transcript) {
  write_file_atomic(transcript.prompt_path, prompt_text);
  std::string response = backend.chat(conversation, options);
  if (response.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::EmptyResponse, "chat backend returned an empty response");
  }
  write_file_atomic(transcript.response_path, response);
  return response;
}

std::string request_script(const std::string& prompt, ChatBackend& backend, const ChatOptions& options,
                           const ChatTranscript& transcript) {
  Conversation c{ChatMessage{ChatRole::User, prompt, std::nullopt}};
  return request_chat(c, prompt, backend, options, transcript);
}

}  // namespace mvgen
