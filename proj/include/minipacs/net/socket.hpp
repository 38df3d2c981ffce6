// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>

#include "minipacs/net/pdu.hpp"

namespace minipacs::net {

/// Owning TCP socket. I/O failures and peer closes raise Error(IoFailure).
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  static Socket connect(const std::string& host, std::uint16_t port);

  void write_all(std::span<const std::uint8_t> bytes);
  void read_exact(std::span<std::uint8_t> out);
  /// Zero disables the timeout.
  void set_receive_timeout(std::chrono::milliseconds timeout);
  /// Unblocks pending reads from other threads.
  void shutdown() noexcept;
  void close() noexcept;
  bool valid() const noexcept { return fd_ >= 0; }
  int fd() const noexcept { return fd_; }

 private:
  int fd_ = -1;
};

class Listener {
 public:
  /// Port 0 picks an ephemeral port. Throws Error(IoFailure) when the
  /// address cannot be bound.
  static Listener bind(const std::string& host, std::uint16_t port);

  Listener() = default;
  ~Listener();
  Listener(Listener&& other) noexcept : fd_(std::exchange(other.fd_, -1)), port_(other.port_) {}
  Listener& operator=(Listener&& other) noexcept;

  std::uint16_t port() const noexcept { return port_; }
  /// Blocks; throws Error(IoFailure) once the listener is closed.
  Socket accept();
  void close() noexcept;

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Reads one PDU; the length is validated before the body is read.
Pdu read_pdu(Socket& socket);
void write_pdu(Socket& socket, const Pdu& pdu);

}  // namespace minipacs::net
