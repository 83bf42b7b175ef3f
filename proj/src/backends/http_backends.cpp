#include "mvgen/backends/http_backends.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "mvgen/simd/kernels.h"
#include "mvgen/util/error.h"

namespace mvgen {

using nlohmann::json;

namespace {

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::string error_message_from(const std::string& body) {
  auto doc = json::parse(body, nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && doc.contains("error") && doc["error"].is_object()) {
    const json& e = doc["error"];
    std::string code = e.value("code", "");
    std::string msg = e.value("message", "");
    return code.empty() ? msg : code + ": " + msg;
  }
  return body.substr(0, 200);
}

void normalize(Embedding& v) {
  const double norm = std::sqrt(simd::sum_squares(v));
  if (norm <= 0.0) throw Error(ErrorCode::BackendMalformed, "backend returned a zero embedding");
  for (float& x : v) x = static_cast<float>(x / norm);
}

}  // namespace

HttpJsonClient::HttpJsonClient(BackendEndpointConfig config) : config_(std::move(config)) {
  const std::string scheme = "http://";
  const std::string& url = config_.base_url;
  if (url.rfind(scheme, 0) != 0 || url.size() == scheme.size()) {
    throw Error(ErrorCode::ConfigInvalid, "backend URL must be http://host[:port][/prefix]: " + url);
  }
  MVGEN_CHECK(config_.timeout_s > 0.0, ErrorCode::ConfigInvalid, "backend timeout_s must be positive");
  MVGEN_CHECK(config_.max_retries >= 0, ErrorCode::ConfigInvalid, "backend max_retries must be >= 0");
  const std::string rest = url.substr(scheme.size());
  const auto slash = rest.find('/');
  host_port_ = rest.substr(0, slash);
  prefix_ = slash == std::string::npos ? "" : rest.substr(slash);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (!config_.auth_token) {
    if (const char* env = std::getenv(kAuthTokenEnv); env && *env) config_.auth_token = env;
  }
}

json HttpJsonClient::post(std::string_view route, const json& body) {
  httplib::Client client(host_port_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (config_.auth_token) headers.emplace("Authorization", "Bearer " + *config_.auth_token);

  const std::string path = prefix_ + std::string(route);
  const std::string payload = body.dump();
  std::string last_error;
  double delay = config_.backoff_initial_s;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      delay *= 2.0;
    }
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "request to " + config_.base_url + path + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      auto doc = json::parse(res->body, nullptr, false);
      if (doc.is_discarded()) throw Error(ErrorCode::BackendMalformed, "backend response is not valid JSON");
      return doc;
    }
    last_error = "HTTP " + std::to_string(res->status) + " from " + path + ": " + error_message_from(res->body);
    if (!retryable_status(res->status)) {
      throw Error(ErrorCode::BackendTransport, last_error, {{"status", res->status}});
    }
  }
  throw Error(ErrorCode::BackendTransport, last_error, {{"attempts", config_.max_retries + 1}});
}

void HttpEmbeddingBackend::check_dim(std::size_t dim) {
  std::lock_guard lock(dim_mutex_);
  if (dim_ == 0) dim_ = dim;
  if (dim != dim_) {
    throw Error(ErrorCode::BackendMalformed, "embedding dimension changed between responses",
                {{"expected", dim_}, {"got", dim}});
  }
}

Embedding HttpEmbeddingBackend::embed_audio(const AudioBuffer& audio) {
  Embedding e = wire::decode_embed_audio_response(
      client_.post(wire::kEmbedAudioRoute, wire::encode_embed_audio_request(audio)));
  check_dim(e.size());
  normalize(e);
  return e;
}

std::vector<Embedding> HttpEmbeddingBackend::embed_texts(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  auto out = wire::decode_embed_text_response(
      client_.post(wire::kEmbedTextRoute, wire::encode_embed_text_request(texts)), texts.size());
  for (Embedding& e : out) {
    check_dim(e.size());
    normalize(e);
  }
  return out;
}

std::string HttpChatBackend::chat(const Conversation& conversation, const ChatOptions& options) {
  return wire::decode_chat_response(client_.post(wire::kChatRoute, wire::encode_chat_request(conversation, options)));
}

VideoPayload HttpVideoBackend::generate(const VideoRequest& request) {
  return wire::decode_video_response(client_.post(wire::kVideoRoute, wire::encode_video_request(request)));
}

}  // namespace mvgen
