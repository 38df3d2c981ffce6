// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minipacs/dicom/dataset.hpp"
#include "minipacs/net/dimse.hpp"
#include "minipacs/net/pdu.hpp"
#include "minipacs/net/socket.hpp"

namespace minipacs::net {

/// One context per abstract syntax, each offering explicit and implicit VR
/// little endian, with ids 1, 3, 5, ...
std::vector<PresentationContext> propose_contexts(const std::vector<std::string>& abstract_syntaxes);

/// Minimal association requestor for ECHO, STORE and FIND.
class DimseClient {
 public:
  /// Throws Error(ProtocolError) when the peer rejects or aborts.
  static DimseClient connect(const std::string& host, std::uint16_t port, const std::string& calling_ae,
                             const std::string& called_ae, std::vector<PresentationContext> contexts);

  DimseClient(DimseClient&&) = default;
  ~DimseClient();

  const AssociateAc& accepted() const noexcept { return ac_; }
  /// Accepted context for the abstract syntax, with its transfer syntax.
  std::optional<std::pair<std::uint8_t, std::string>> context_for(std::string_view abstract_syntax) const;

  std::uint16_t echo();
  /// Encodes the dataset in the accepted transfer syntax for its SOP class.
  std::uint16_t store(const dicom::DicomObject& obj);
  /// Final status plus every pending identifier, in order.
  std::pair<std::uint16_t, std::vector<dicom::DataSet>> find(const dicom::DataSet& identifier);

  void release();
  void abort();
  Socket& socket() noexcept { return socket_; }

 private:
  DimseClient(Socket socket, AssociateRq rq, AssociateAc ac);
  ReceivedMessage expect_message();

  Socket socket_;
  AssociateRq rq_;
  AssociateAc ac_;
  std::uint16_t next_id_ = 1;
  bool open_ = true;
};

}  // namespace minipacs::net
