// SPDX-License-Identifier: Apache-2.0
// DIMSE messages and their framing into P-DATA-TF PDUs.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "minipacs/dicom/dataset.hpp"
#include "minipacs/net/pdu.hpp"
#include "minipacs/net/socket.hpp"

namespace minipacs::net {

namespace command {
inline constexpr std::uint16_t kCStoreRq = 0x0001;
inline constexpr std::uint16_t kCStoreRsp = 0x8001;
inline constexpr std::uint16_t kCFindRq = 0x0020;
inline constexpr std::uint16_t kCFindRsp = 0x8020;
inline constexpr std::uint16_t kCEchoRq = 0x0030;
inline constexpr std::uint16_t kCEchoRsp = 0x8030;
inline constexpr std::uint16_t kCCancelRq = 0x0FFF;
}  // namespace command

namespace status {
inline constexpr std::uint16_t kSuccess = 0x0000;
inline constexpr std::uint16_t kPending = 0xFF00;
inline constexpr std::uint16_t kCancel = 0xFE00;
inline constexpr std::uint16_t kOutOfResources = 0xA700;
inline constexpr std::uint16_t kIdentifierMismatch = 0xA900;
inline constexpr std::uint16_t kCannotUnderstand = 0xC000;
inline constexpr std::uint16_t kUnableToProcess = 0xC001;
}  // namespace status

/// CommandDataSetType value meaning "no data set follows".
inline constexpr std::uint16_t kNoDataSet = 0x0101;

struct DimseMessage {
  dicom::DataSet command;
  /// Data set bytes in the presentation context's transfer syntax.
  std::optional<Bytes> data;

  std::uint16_t command_field() const;
  std::uint16_t message_id() const;
  std::uint16_t status() const;
  /// False when CommandDataSetType is 0x0101.
  bool announces_data() const;
  std::string affected_sop_class() const;
};

/// Command set with the usual fields filled in; data set type is set from
/// `has_data`.
dicom::DataSet make_command(std::uint16_t field, std::uint16_t message_id, std::string_view sop_class, bool has_data);
dicom::DataSet make_response(const DimseMessage& request, std::uint16_t field, std::uint16_t status_code, bool has_data);

/// Command sets are always implicit VR little endian, with the group length
/// element recomputed.
Bytes encode_command(const dicom::DataSet& command);
dicom::DataSet decode_command(std::span<const std::uint8_t> bytes);

struct ReceivedMessage {
  std::uint8_t context_id = 0;
  DimseMessage message;
};

/// Frames DIMSE messages over an established association.
class MessageChannel {
 public:
  MessageChannel(Socket& socket, std::uint32_t peer_max_pdu) : socket_(socket), peer_max_pdu_(peer_max_pdu) {}

  /// Splits command and data into PDVs fitting the peer's max PDU length.
  void send(std::uint8_t context_id, const dicom::DataSet& command, const Bytes* data = nullptr);

  /// Reassembles the next message. Any other PDU arriving first is returned
  /// as is. Throws Error(ProtocolError) for interleaved or inconsistent
  /// fragments.
  std::variant<ReceivedMessage, Pdu> receive();

 private:
  void send_fragments(std::uint8_t context_id, bool command, std::span<const std::uint8_t> bytes);

  Socket& socket_;
  std::uint32_t peer_max_pdu_;
};

}  // namespace minipacs::net
