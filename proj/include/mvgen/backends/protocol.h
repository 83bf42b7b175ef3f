#pragma once

/// @file protocol.h
/// @brief Backend interfaces and the JSON-over-HTTP wire format.
///
/// Four routes isolate all model inference:
///   POST /v1/embed/audio  {"audio_wav_b64"}                -> {"model", "dim", "embedding"}
///   POST /v1/embed/text   {"texts"}                        -> {"model", "dim", "embeddings"}
///   POST /v1/chat         {"messages", "seed", "temperature"} -> {"model", "text"}
///   POST /v1/video        {"prompt", "duration_s", "width", "height", "fps", "seed"}
///                                                          -> {"model", "fps", "width", "height", "frames_png_b64"}
/// Failures use a non-2xx status and {"error": {"code", "message"}}.
/// docs/protocol.md and docs/schemas/ hold the normative schemas.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mvgen/audio/audio_buffer.h"

namespace mvgen {

using Embedding = std::vector<float>;

enum class BackendKind { Embed, Chat, ChatAudio, Video };
std::string_view to_string(BackendKind kind);

struct BackendEndpointConfig {
  std::string base_url;
  BackendKind kind = BackendKind::Embed;
  double timeout_s = 120.0;
  int max_retries = 2;
  std::optional<std::string> auth_token;
  /// First retry delay; doubles per attempt.
  double backoff_initial_s = 0.5;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  /// Stable identity (model name); keys the label-embedding cache.
  virtual std::string identity() const = 0;
  virtual Embedding embed_audio(const AudioBuffer& audio) = 0;
  virtual std::vector<Embedding> embed_texts(std::span<const std::string> texts) = 0;
};

enum class ChatRole { System, User, Assistant };
std::string_view to_string(ChatRole role);
ChatRole chat_role_from_string(std::string_view name);

/// Audio attachment: a WAV file on disk, or WAV bytes already in memory
/// (as decoded from a request). Clients inline it as base64 on the wire.
struct AudioRef {
  std::filesystem::path path;
  std::optional<std::string> wav_bytes;

  /// The WAV bytes; reads `path` when nothing is held inline. Errors: IoError.
  std::string load() const;
};

/// One turn. At least one of text / audio is present.
struct ChatMessage {
  ChatRole role = ChatRole::User;
  std::optional<std::string> text;
  std::optional<AudioRef> audio;
};

using Conversation = std::vector<ChatMessage>;

struct ChatOptions {
  std::uint64_t seed = 0;
  double temperature = 0.0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string identity() const = 0;
  virtual std::string chat(const Conversation& conversation, const ChatOptions& options) = 0;
};

struct VideoRequest {
  std::string prompt;
  double duration_s = 0.0;
  int width = 512;
  int height = 512;
  double fps = 12.0;
  std::uint64_t seed = 0;
};

/// Packed 8-bit RGB.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
};

struct VideoPayload {
  double fps = 0.0;
  int width = 0;
  int height = 0;
  std::vector<Frame> frames;
};

class VideoBackend {
 public:
  virtual ~VideoBackend() = default;
  virtual std::string identity() const = 0;
  virtual VideoPayload generate(const VideoRequest& request) = 0;
};

/// The set of backends a run talks to.
struct BackendSet {
  std::shared_ptr<EmbeddingBackend> embed;
  std::shared_ptr<ChatBackend> chat;
  std::shared_ptr<ChatBackend> chat_audio;
  std::shared_ptr<VideoBackend> video;
};

namespace wire {

inline constexpr std::string_view kEmbedAudioRoute = "/v1/embed/audio";
inline constexpr std::string_view kEmbedTextRoute = "/v1/embed/text";
inline constexpr std::string_view kChatRoute = "/v1/chat";
inline constexpr std::string_view kVideoRoute = "/v1/video";

// Encoders build request/response documents; decoders validate structure
// and throw Error(BackendMalformed) naming the offending field.

nlohmann::json encode_embed_audio_request(const AudioBuffer& audio);
/// Keeps the transported sample rate; multi-channel audio is downmixed.
AudioBuffer decode_embed_audio_request(const nlohmann::json& doc);
nlohmann::json encode_embed_audio_response(const std::string& model, const Embedding& embedding);
Embedding decode_embed_audio_response(const nlohmann::json& doc);

nlohmann::json encode_embed_text_request(std::span<const std::string> texts);
std::vector<std::string> decode_embed_text_request(const nlohmann::json& doc);
nlohmann::json encode_embed_text_response(const std::string& model, const std::vector<Embedding>& embeddings);
std::vector<Embedding> decode_embed_text_response(const nlohmann::json& doc, std::size_t expected_count);

/// Audio attachments are loaded and inlined.
nlohmann::json encode_chat_request(const Conversation& conversation, const ChatOptions& options);

/// Decoded chat request; audio attachments are held inline.
struct ChatRequestDoc {
  Conversation messages;
  ChatOptions options;
};
ChatRequestDoc decode_chat_request(const nlohmann::json& doc);
nlohmann::json encode_chat_response(const std::string& model, const std::string& text);
std::string decode_chat_response(const nlohmann::json& doc);

nlohmann::json encode_video_request(const VideoRequest& request);
VideoRequest decode_video_request(const nlohmann::json& doc);
nlohmann::json encode_video_response(const std::string& model, const VideoPayload& payload);
VideoPayload decode_video_response(const nlohmann::json& doc);

nlohmann::json encode_error(std::string_view code, std::string_view message);

}  // namespace wire

}  // namespace mvgen
