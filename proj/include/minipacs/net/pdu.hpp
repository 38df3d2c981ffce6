// SPDX-License-Identifier: Apache-2.0
// DICOM upper-layer protocol data units.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "minipacs/dicom/uids.hpp"

namespace minipacs::net {

using Bytes = std::vector<std::uint8_t>;

/// Largest PDU body accepted from a peer.
inline constexpr std::uint32_t kMaxPduBody = 4u * 1024 * 1024;
/// Max PDU length this implementation advertises.
inline constexpr std::uint32_t kAdvertisedMaxPdu = 16384;

enum class PduType : std::uint8_t {
  AssociateRq = 0x01,
  AssociateAc = 0x02,
  AssociateRj = 0x03,
  PDataTf = 0x04,
  ReleaseRq = 0x05,
  ReleaseRp = 0x06,
  Abort = 0x07,
};

/// Presentation context result codes (A-ASSOCIATE-AC).
enum class ContextResult : std::uint8_t {
  Acceptance = 0,
  UserRejection = 1,
  NoReason = 2,
  AbstractSyntaxNotSupported = 3,
  TransferSyntaxesNotSupported = 4,
};

struct PresentationContext {
  std::uint8_t id = 1;
  std::string abstract_syntax;                 // empty in an AC
  std::vector<std::string> transfer_syntaxes;  // one entry in an AC
  std::optional<ContextResult> result;         // AC only

  bool operator==(const PresentationContext&) const = default;
};

struct UserInformation {
  std::uint32_t max_pdu_length = kAdvertisedMaxPdu;
  std::optional<std::string> implementation_class_uid;
  std::optional<std::string> implementation_version_name;

  bool operator==(const UserInformation&) const = default;
};

/// Shared layout of A-ASSOCIATE-RQ and -AC.
struct AssociateBody {
  std::uint16_t protocol_version = 1;
  std::string called_ae;
  std::string calling_ae;
  std::string application_context = std::string(dicom::uids::kApplicationContext);
  std::vector<PresentationContext> contexts;
  UserInformation user_info;

  bool operator==(const AssociateBody&) const = default;
};

struct AssociateRq : AssociateBody {
  bool operator==(const AssociateRq&) const = default;
};
struct AssociateAc : AssociateBody {
  bool operator==(const AssociateAc&) const = default;
};

struct AssociateRj {
  std::uint8_t result = 1;  // 1 permanent, 2 transient
  std::uint8_t source = 1;  // 1 service user, 2 provider (ACSE), 3 provider (presentation)
  std::uint8_t reason = 1;

  bool operator==(const AssociateRj&) const = default;
};

/// Presentation data value: one fragment of a command or data set.
struct Pdv {
  std::uint8_t context_id = 1;
  bool command = false;
  bool last = false;
  Bytes data;

  bool operator==(const Pdv&) const = default;
};

struct PDataTf {
  std::vector<Pdv> pdvs;
  bool operator==(const PDataTf&) const = default;
};

struct ReleaseRq {
  bool operator==(const ReleaseRq&) const = default;
};
struct ReleaseRp {
  bool operator==(const ReleaseRp&) const = default;
};

struct Abort {
  std::uint8_t source = 0;  // 0 service user, 2 service provider
  std::uint8_t reason = 0;

  bool operator==(const Abort&) const = default;
};

using Pdu = std::variant<AssociateRq, AssociateAc, AssociateRj, PDataTf, ReleaseRq, ReleaseRp, Abort>;

PduType pdu_type(const Pdu& pdu) noexcept;

/// Throws Error(Malformed) for AE titles over 16 bytes or item fields that
/// do not fit their length fields.
Bytes encode_pdu(const Pdu& pdu);

/// Parses exactly one PDU, header included. Throws Error(Truncated),
/// Error(BadPduType), Error(Oversize) when the body length exceeds
/// kMaxPduBody, or Error(Malformed) for inconsistent item structure.
Pdu decode_pdu(std::span<const std::uint8_t> bytes);

/// Body length from a 6-byte PDU header, after validating type and size.
std::uint32_t pdu_body_length(std::span<const std::uint8_t, 6> header);

}  // namespace minipacs::net
