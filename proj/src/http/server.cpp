// SPDX-License-Identifier: Apache-2.0
#include "minipacs/http/server.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "minipacs/error.hpp"

namespace minipacs::http {

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

void serve(const Api& api, const httplib::Request& in, httplib::Response& out) {
  plugin::WebRequest req;
  req.method = in.method;
  req.path = in.path;
  req.body = in.body;
  for (const auto& [k, v] : in.params) req.params.emplace(k, v);
  for (const auto& [k, v] : in.headers) req.headers.emplace(k, v);
  plugin::WebResponse res;
  try {
    res = api.handle(req);
  } catch (const std::exception& e) {
    res = {500, "application/json", nlohmann::json{{"error", e.what()}}.dump()};
  }
  spdlog::info("{} {} -> {}", in.method, in.path, res.status);
  out.status = res.status;
  out.set_content(res.body, res.content_type);
  out.set_header("Access-Control-Allow-Origin", "*");
}

}  // namespace

HttpServer::HttpServer(const Api& api, std::string host, std::uint16_t port)
    : impl_(std::make_unique<Impl>()), host_(std::move(host)), port_(port) {
  auto handler = [&api](const httplib::Request& in, httplib::Response& out) { serve(api, in, out); };
  // Plain SO_REUSEADDR: a second server on the same port must fail to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start() {
  if (port_ == 0) {
    int bound = impl_->server.bind_to_any_port(host_);
    if (bound < 0) throw Error(Errc::IoFailure, fmt::format("cannot bind HTTP on {}", host_));
    port_ = static_cast<std::uint16_t>(bound);
  } else if (!impl_->server.bind_to_port(host_, port_)) {
    throw Error(Errc::IoFailure, fmt::format("cannot bind HTTP on {}:{}", host_, port_));
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  if (!thread_.joinable()) return;
  impl_->server.stop();
  thread_.join();
}

}  // namespace minipacs::http
