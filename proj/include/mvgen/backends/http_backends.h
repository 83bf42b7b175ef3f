#pragma once

/// @file http_backends.h
/// @brief Protocol clients over plain HTTP.
///
/// Requests are idempotent POSTs. Transport failures, 5xx and 429 responses
/// are retried up to max_retries times with exponential backoff starting at
/// backoff_initial_s; other 4xx responses fail at once. The final failure
/// carries the last error seen.

#include <memory>
#include <mutex>
#include <string>

#include "mvgen/backends/protocol.h"

namespace mvgen {

/// Environment variable consulted for the bearer token when the endpoint
/// config does not set one.
inline constexpr const char* kAuthTokenEnv = "MVGEN_AUTH_TOKEN";

class HttpJsonClient {
 public:
  /// Errors: ConfigInvalid for a URL that is not http://host[:port][/prefix],
  /// or for timeout_s <= 0 / max_retries < 0.
  explicit HttpJsonClient(BackendEndpointConfig config);
  HttpJsonClient(const HttpJsonClient&) = delete;
  HttpJsonClient& operator=(const HttpJsonClient&) = delete;

  /// POSTs `body` to prefix + route and returns the parsed 2xx response.
  /// Errors: BackendTransport (network, status), BackendMalformed (not JSON).
  nlohmann::json post(std::string_view route, const nlohmann::json& body);

  const BackendEndpointConfig& config() const { return config_; }

 private:
  BackendEndpointConfig config_;
  std::string host_port_;
  std::string prefix_;
};

class HttpEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(BackendEndpointConfig config) : client_(std::move(config)) {}
  std::string identity() const override { return "http:" + client_.config().base_url; }
  /// The returned vector is L2-normalized; a dimension that differs from
  /// earlier responses is BackendMalformed.
  Embedding embed_audio(const AudioBuffer& audio) override;
  std::vector<Embedding> embed_texts(std::span<const std::string> texts) override;

 private:
  void check_dim(std::size_t dim);
  HttpJsonClient client_;
  std::mutex dim_mutex_;
  std::size_t dim_ = 0;
};

class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(BackendEndpointConfig config) : client_(std::move(config)) {}
  std::string identity() const override { return "http:" + client_.config().base_url; }
  std::string chat(const Conversation& conversation, const ChatOptions& options) override;

 private:
  HttpJsonClient client_;
};

class HttpVideoBackend : public VideoBackend {
 public:
  explicit HttpVideoBackend(BackendEndpointConfig config) : client_(std::move(config)) {}
  std::string identity() const override { return "http:" + client_.config().base_url; }
  VideoPayload generate(const VideoRequest& request) override;

 private:
  HttpJsonClient client_;
};

}  // namespace mvgen
