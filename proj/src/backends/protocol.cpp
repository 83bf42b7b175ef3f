#include "mvgen/backends/protocol.h"

#include <cmath>

#include "mvgen/audio/wav_io.h"
#include "mvgen/generation/image_io.h"
#include "mvgen/util/error.h"
#include "mvgen/util/files.h"
#include "mvgen/util/hashing.h"

namespace mvgen {

using nlohmann::json;

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Embed: return "embed";
    case BackendKind::Chat: return "chat";
    case BackendKind::ChatAudio: return "chat_audio";
    case BackendKind::Video: return "video";
  }
  return "embed";
}

std::string_view to_string(ChatRole role) {
  switch (role) {
    case ChatRole::System: return "system";
    case ChatRole::User: return "user";
    case ChatRole::Assistant: return "assistant";
  }
  return "user";
}

std::string AudioRef::load() const {
  if (wav_bytes) return *wav_bytes;
  return read_file(path);
}

ChatRole chat_role_from_string(std::string_view name) {
  if (name == "system") return ChatRole::System;
  if (name == "user") return ChatRole::User;
  if (name == "assistant") return ChatRole::Assistant;
  throw Error(ErrorCode::BackendMalformed, "invalid chat role: " + std::string(name));
}

namespace wire {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::BackendMalformed, "malformed payload: " + what);
}

const json& field(const json& doc, const char* name) {
  if (!doc.is_object()) malformed("expected a JSON object");
  auto it = doc.find(name);
  if (it == doc.end()) malformed(std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_string()) malformed(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

double number_field(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_number()) malformed(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::int64_t int_field(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_number_integer()) malformed(std::string("field '") + name + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t seed_field(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    malformed(std::string("field '") + name + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<std::uint8_t> base64_field(const std::string& text, const char* name) {
  try {
    return base64_decode(text);
  } catch (const Error& e) {
    malformed(std::string("field '") + name + "': " + e.what());
  }
}

Embedding vector_from(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) malformed(std::string(what) + " must be a non-empty array");
  Embedding out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number()) malformed(std::string(what) + " must contain only numbers");
    const double d = x.get<double>();
    if (!std::isfinite(d)) malformed(std::string(what) + " contains a non-finite value");
    out.push_back(static_cast<float>(d));
  }
  return out;
}

void check_dim(const json& doc, std::size_t actual) {
  const std::int64_t dim = int_field(doc, "dim");
  if (dim <= 0 || static_cast<std::size_t>(dim) != actual) {
    malformed("'dim' does not match the embedding length");
  }
}

}  // namespace

json encode_embed_audio_request(const AudioBuffer& audio) {
  return {{"audio_wav_b64", base64_encode(encode_wav(audio))}};
}

AudioBuffer decode_embed_audio_request(const json& doc) {
  auto bytes = base64_field(string_field(doc, "audio_wav_b64"), "audio_wav_b64");
  const std::string_view view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  try {
    return decode_audio(view, parse_wav(view).sample_rate);
  } catch (const Error& e) {
    malformed(std::string("audio_wav_b64: ") + e.what());
  }
}

json encode_embed_audio_response(const std::string& model, const Embedding& embedding) {
  return {{"model", model}, {"dim", embedding.size()}, {"embedding", embedding}};
}

Embedding decode_embed_audio_response(const json& doc) {
  string_field(doc, "model");
  Embedding e = vector_from(field(doc, "embedding"), "embedding");
  check_dim(doc, e.size());
  return e;
}

json encode_embed_text_request(std::span<const std::string> texts) {
  return {{"texts", json(std::vector<std::string>(texts.begin(), texts.end()))}};
}

std::vector<std::string> decode_embed_text_request(const json& doc) {
  const json& t = field(doc, "texts");
  if (!t.is_array() || t.empty()) malformed("'texts' must be a non-empty array");
  std::vector<std::string> out;
  for (const json& s : t) {
    if (!s.is_string()) malformed("'texts' must contain only strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

json encode_embed_text_response(const std::string& model, const std::vector<Embedding>& embeddings) {
  const std::size_t dim = embeddings.empty() ? 0 : embeddings.front().size();
  return {{"model", model}, {"dim", dim}, {"embeddings", embeddings}};
}

std::vector<Embedding> decode_embed_text_response(const json& doc, std::size_t expected_count) {
  string_field(doc, "model");
  const json& arr = field(doc, "embeddings");
  if (!arr.is_array()) malformed("'embeddings' must be an array");
  if (arr.size() != expected_count) malformed("'embeddings' count does not match the request");
  std::vector<Embedding> out;
  for (const json& v : arr) out.push_back(vector_from(v, "embeddings[i]"));
  for (const Embedding& e : out) check_dim(doc, e.size());
  return out;
}

json encode_chat_request(const Conversation& conversation, const ChatOptions& options) {
  json messages = json::array();
  for (const ChatMessage& m : conversation) {
    json content = json::array();
    if (m.audio) {
      const std::string bytes = m.audio->load();
      content.push_back({{"type", "audio"}, {"audio_wav_b64", base64_encode(bytes)}});
    }
    if (m.text) content.push_back({{"type", "text"}, {"text", *m.text}});
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", content}});
  }
  return {{"messages", messages}, {"seed", options.seed}, {"temperature", options.temperature}};
}

ChatRequestDoc decode_chat_request(const json& doc) {
  ChatRequestDoc out;
  const json& msgs = field(doc, "messages");
  if (!msgs.is_array() || msgs.empty()) malformed("'messages' must be a non-empty array");
  for (const json& m : msgs) {
    ChatMessage msg;
    msg.role = chat_role_from_string(string_field(m, "role"));
    const json& content = field(m, "content");
    if (!content.is_array() || content.empty()) malformed("message 'content' must be a non-empty array");
    for (const json& part : content) {
      const std::string type = string_field(part, "type");
      if (type == "text") {
        msg.text = msg.text.value_or("") + string_field(part, "text");
      } else if (type == "audio") {
        auto bytes = base64_field(string_field(part, "audio_wav_b64"), "audio_wav_b64");
        msg.audio = AudioRef{{}, std::string(bytes.begin(), bytes.end())};
      } else {
        malformed("unknown content part type '" + type + "'");
      }
    }
    out.messages.push_back(std::move(msg));
  }
  out.options.seed = seed_field(doc, "seed");
  out.options.temperature = number_field(doc, "temperature");
  return out;
}

json encode_chat_response(const std::string& model, const std::string& text) {
  return {{"model", model}, {"text", text}};
}

std::string decode_chat_response(const json& doc) {
  string_field(doc, "model");
  return string_field(doc, "text");
}

json encode_video_request(const VideoRequest& r) {
  return {{"prompt", r.prompt}, {"duration_s", r.duration_s}, {"width", r.width},
          {"height", r.height}, {"fps", r.fps},               {"seed", r.seed}};
}

VideoRequest decode_video_request(const json& doc) {
  VideoRequest r;
  r.prompt = string_field(doc, "prompt");
  r.duration_s = number_field(doc, "duration_s");
  r.width = static_cast<int>(int_field(doc, "width"));
  r.height = static_cast<int>(int_field(doc, "height"));
  r.fps = number_field(doc, "fps");
  r.seed = seed_field(doc, "seed");
  if (!(r.duration_s > 0.0)) malformed("'duration_s' must be positive");
  if (!(r.fps > 0.0)) malformed("'fps' must be positive");
  if (r.width <= 0 || r.height <= 0) malformed("'width' and 'height' must be positive");
  return r;
}

json encode_video_response(const std::string& model, const VideoPayload& payload) {
  json frames = json::array();
  for (const Frame& f : payload.frames) frames.push_back(base64_encode(encode_png(f)));
  return {{"model", model},
          {"fps", payload.fps},
          {"width", payload.width},
          {"height", payload.height},
          {"frames_png_b64", frames}};
}

VideoPayload decode_video_response(const json& doc) {
  string_field(doc, "model");
  VideoPayload p;
  p.fps = number_field(doc, "fps");
  p.width = static_cast<int>(int_field(doc, "width"));
  p.height = static_cast<int>(int_field(doc, "height"));
  const json& frames = field(doc, "frames_png_b64");
  if (!frames.is_array()) malformed("'frames_png_b64' must be an array");
  for (const json& f : frames) {
    if (!f.is_string()) malformed("'frames_png_b64' must contain strings");
    auto bytes = base64_field(f.get<std::string>(), "frames_png_b64");
    p.frames.push_back(decode_png(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size())));
  }
  return p;
}

json encode_error(std::string_view code, std::string_view message) {
  return {{"error", {{"code", std::string(code)}, {"message", std::string(message)}}}};
}

}  // namespace wire

}  // namespace mvgen
