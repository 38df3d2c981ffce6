// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "minipacs/dicom/dataset.hpp"
#include "minipacs/net/dimse.hpp"
#include "minipacs/net/pdu.hpp"
#include "minipacs/net/socket.hpp"

namespace minipacs::net {

/// Accepts Verification, Storage and Study Root FIND contexts, preferring
/// explicit VR little endian. Rejects the association when the called AE
/// title differs. Throws Error(ProtocolError) for even or repeated context
/// ids.
std::variant<AssociateAc, AssociateRj> negotiate_association(const AssociateRq& rq, std::string_view aetitle);

struct FindOutcome {
  std::uint16_t status = status::kSuccess;
  std::vector<dicom::DataSet> matches;
};

/// What the SCP does with decoded requests.
class ScpHandlers {
 public:
  virtual ~ScpHandlers() = default;
  /// Returns the C-STORE status.
  virtual std::uint16_t on_store(const dicom::DicomObject& obj) = 0;
  virtual FindOutcome on_find(const dicom::DataSet& identifier) = 0;
};

struct ScpConfig {
  std::string aetitle = "MINIPACS";
  std::string host = "0.0.0.0";
  std::uint16_t port = 11112;
  std::chrono::milliseconds idle_timeout{60000};
};

/// Thread-per-connection DIMSE server for C-ECHO, C-STORE and C-FIND.
class DimseServer {
 public:
  DimseServer(ScpConfig config, ScpHandlers& handlers);
  ~DimseServer();

  /// Binds and starts accepting. Throws Error(IoFailure) when the port
  /// cannot be bound.
  void start();
  /// Stops accepting, aborts open associations and joins all threads.
  void stop();
  std::uint16_t port() const noexcept { return listener_port_; }

  /// Serves one association on `socket`; used by the accept loop.
  void serve_connection(Socket& socket);

 private:
  struct Connection {
    Socket socket;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  void accept_loop();
  void reap(bool all);
  bool handle_message(MessageChannel& channel, const ReceivedMessage& rx, const AssociateAc& ac);

  ScpConfig config_;
  ScpHandlers& handlers_;
  Listener listener_;
  std::uint16_t listener_port_ = 0;
  std::thread acceptor_;
  std::atomic<bool> running_{false};
  std::mutex connections_mutex_;
  std::list<std::unique_ptr<Connection>> connections_;
};

}  // namespace minipacs::net
