#include "mvgen/backends/mock_server.h"

#include <functional>
#include <thread>

#include "httplib.h"
#include "mvgen/util/error.h"

namespace mvgen {

using nlohmann::json;

struct MockServer::Impl {
  BackendSet backends;
  httplib::Server server;
  std::thread thread;
};

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

MockServer::MockServer(BackendSet backends, std::string host)
    : impl_(std::make_unique<Impl>()), host_(std::move(host)) {
  impl_->backends = std::move(backends);
  auto& srv = impl_->server;
  srv.set_payload_max_length(std::size_t{256} << 20);

  auto route = [this](std::string_view path, std::function<json(const json&)> handler) {
    impl_->server.Post(std::string(path), [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (pending_failures_.load() > 0) {
        --pending_failures_;
        reply(res, failure_status_.load(), wire::encode_error("Injected", "injected failure"));
        return;
      }
      auto doc = json::parse(req.body, nullptr, false);
      if (doc.is_discarded()) {
        reply(res, 400, wire::encode_error("BackendMalformed", "request body is not valid JSON"));
        return;
      }
      try {
        reply(res, 200, handler(doc));
      } catch (const Error& e) {
        int status = e.code() == ErrorCode::BackendMalformed ? 400 : 500;
        if (e.details().contains("http_status")) status = e.details()["http_status"].get<int>();
        reply(res, status, wire::encode_error(error_code_name(e.code()), e.what()));
      } catch (const std::exception& e) {
        reply(res, 500, wire::encode_error("Internal", e.what()));
      }
    });
  };

  auto unavailable = [](std::string_view what) {
    return Error(ErrorCode::BackendTransport, std::string(what) + " backend not configured",
                 {{"http_status", 503}});
  };

  route(wire::kEmbedAudioRoute, [this, unavailable](const json& doc) {
    auto& b = impl_->backends.embed;
    if (!b) throw unavailable("embedding");
    return wire::encode_embed_audio_response(b->identity(), b->embed_audio(wire::decode_embed_audio_request(doc)));
  });
  route(wire::kEmbedTextRoute, [this, unavailable](const json& doc) {
    auto& b = impl_->backends.embed;
    if (!b) throw unavailable("embedding");
    return wire::encode_embed_text_response(b->identity(), b->embed_texts(wire::decode_embed_text_request(doc)));
  });
  route(wire::kChatRoute, [this, unavailable](const json& doc) {
    wire::ChatRequestDoc req = wire::decode_chat_request(doc);
    bool has_audio = false;
    for (const ChatMessage& m : req.messages) has_audio = has_audio || m.audio.has_value();
    auto& b = has_audio && impl_->backends.chat_audio ? impl_->backends.chat_audio : impl_->backends.chat;
    if (!b) throw unavailable("chat");
    return wire::encode_chat_response(b->identity(), b->chat(req.messages, req.options));
  });
  route(wire::kVideoRoute, [this, unavailable](const json& doc) {
    auto& b = impl_->backends.video;
    if (!b) throw unavailable("video");
    return wire::encode_video_response(b->identity(), b->generate(wire::decode_video_request(doc)));
  });
}

MockServer::~MockServer() { stop(); }

void MockServer::start(int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    port_ = srv.bind_to_any_port(host_);
  } else {
    port_ = srv.bind_to_port(host_, port) ? port : -1;
  }
  if (port_ <= 0) throw Error(ErrorCode::IoError, "cannot bind mock server on " + host_);
  impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
}

void MockServer::serve_forever(int port) {
  auto& srv = impl_->server;
  if (!srv.bind_to_port(host_, port)) {
    throw Error(ErrorCode::IoError, "cannot bind mock server on " + host_ + ":" + std::to_string(port));
  }
  port_ = port;
  srv.listen_after_bind();
}

void MockServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

}  // namespace mvgen
