// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "minipacs/http/api.hpp"

namespace minipacs::http {

/// HTTP/1.1 transport for an Api.
class HttpServer {
 public:
  HttpServer(const Api& api, std::string host, std::uint16_t port);
  ~HttpServer();

  /// Binds and serves on a background thread. Throws Error(IoFailure) when
  /// the port cannot be bound. Port 0 picks a free one.
  void start();
  void stop();
  std::uint16_t port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  std::uint16_t port_;
  std::thread thread_;
};

}  // namespace minipacs::http
