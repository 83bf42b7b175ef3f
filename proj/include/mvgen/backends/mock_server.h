#pragma once

/// @file mock_server.h
/// @brief HTTP server exposing a BackendSet on the four protocol routes.
///
/// Used by the `serve-mock` command and by client tests. Malformed requests
/// get 400, backend failures 500, both with an {"error": {...}} body.

#include <atomic>
#include <memory>
#include <string>

#include "mvgen/backends/protocol.h"

namespace mvgen {

class MockServer {
 public:
  /// Missing members of `backends` answer their routes with 503.
  explicit MockServer(BackendSet backends, std::string host = "127.0.0.1");
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Binds (port 0 picks a free one) and serves on a background thread.
  /// Errors: IoError when the port cannot be bound.
  void start(int port = 0);
  /// Binds and serves on the calling thread until stop().
  void serve_forever(int port);
  void stop();

  int port() const { return port_; }
  std::string base_url() const;

  /// The next `count` requests fail with `status` before reaching a backend.
  void inject_failures(int count, int status = 503) {
    failure_status_ = status;
    pending_failures_ = count;
  }
  int request_count() const { return requests_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  int port_ = 0;
  std::atomic<int> pending_failures_{0};
  std::atomic<int> failure_status_{503};
  std::atomic<int> requests_{0};
};

}  // namespace mvgen
