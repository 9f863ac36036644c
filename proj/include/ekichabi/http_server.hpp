#pragma once

/// @file ekichabi/http_server.hpp
/// @brief HTTP routes for the gateway and the offline-client sync service.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "ekichabi/gateway.hpp"
#include "ekichabi/sync.hpp"

namespace ekichabi {

struct HttpOptions {
  std::string host = "0.0.0.0";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> ui_dir;
  /// When set, /admin/* requests must carry it in X-Admin-Token.
  std::string admin_token;
};

class HttpServer {
 public:
  HttpServer(GatewayService& gateway, SyncService& sync, HttpOptions options = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and returns the bound port; throws std::runtime_error on failure.
  int bind();
  /// Serves until stop(); call bind() first.
  void serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ekichabi
