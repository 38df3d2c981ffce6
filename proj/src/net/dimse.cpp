// SPDX-License-Identifier: Apache-2.0
#include "minipacs/net/dimse.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "minipacs/dicom/codec.hpp"
#include "minipacs/error.hpp"

namespace minipacs::net {

using dicom::DataElement;
using dicom::DataSet;
using dicom::Vr;
namespace tags = dicom::tags;

namespace {

std::uint16_t us_value(const DataSet& ds, dicom::Tag tag) {
  const auto* el = ds.find(tag);
  if (!el || !el->integer_values() || el->integer_values()->empty()) return 0;
  return static_cast<std::uint16_t>(el->integer_values()->front());
}

}  // namespace

std::uint16_t DimseMessage::command_field() const { return us_value(command, tags::kCommandField); }
std::uint16_t DimseMessage::message_id() const { return us_value(command, tags::kMessageId); }
std::uint16_t DimseMessage::status() const { return us_value(command, tags::kStatus); }

bool DimseMessage::announces_data() const {
  const auto* el = command.find(tags::kCommandDataSetType);
  return el && us_value(command, tags::kCommandDataSetType) != kNoDataSet;
}

std::string DimseMessage::affected_sop_class() const {
  return dicom::get_value_string(command, tags::kAffectedSopClassUid).value_or("");
}

DataSet make_command(std::uint16_t field, std::uint16_t message_id, std::string_view sop_class, bool has_data) {
  DataSet cmd;
  if (!sop_class.empty()) cmd.set(DataElement::text(tags::kAffectedSopClassUid, Vr::UI, std::string(sop_class)));
  cmd.set(DataElement::integers(tags::kCommandField, Vr::US, {field}));
  cmd.set(DataElement::integers(tags::kMessageId, Vr::US, {message_id}));
  cmd.set(DataElement::integers(tags::kCommandDataSetType, Vr::US, {has_data ? 0x0000 : kNoDataSet}));
  return cmd;
}

DataSet make_response(const DimseMessage& request, std::uint16_t field, std::uint16_t status_code, bool has_data) {
  DataSet cmd;
  auto sop_class = request.affected_sop_class();
  if (!sop_class.empty()) cmd.set(DataElement::text(tags::kAffectedSopClassUid, Vr::UI, sop_class));
  cmd.set(DataElement::integers(tags::kCommandField, Vr::US, {field}));
  cmd.set(DataElement::integers(tags::kMessageIdBeingRespondedTo, Vr::US, {request.message_id()}));
  cmd.set(DataElement::integers(tags::kCommandDataSetType, Vr::US, {has_data ? 0x0000 : kNoDataSet}));
  cmd.set(DataElement::integers(tags::kStatus, Vr::US, {status_code}));
  if (auto sop = dicom::get_value_string(request.command, tags::kAffectedSopInstanceUid); sop && !sop->empty())
    cmd.set(DataElement::text(tags::kAffectedSopInstanceUid, Vr::UI, *sop));
  return cmd;
}

Bytes encode_command(const DataSet& command) {
  DataSet body = command;
  body.erase(dicom::Tag{0x0000, 0x0000});
  auto elements = dicom::encode_dataset(body, dicom::Syntax::ImplicitLittle);
  DataSet group;
  group.set(DataElement::integers(dicom::Tag{0x0000, 0x0000}, Vr::UL, {static_cast<std::int64_t>(elements.size())}));
  auto out = dicom::encode_dataset(group, dicom::Syntax::ImplicitLittle);
  out.insert(out.end(), elements.begin(), elements.end());
  return out;
}

DataSet decode_command(std::span<const std::uint8_t> bytes) {
  auto ds = dicom::decode_dataset(bytes, dicom::Syntax::ImplicitLittle);
  for (const auto& [tag, _] : ds) {
    if (tag.group != 0x0000) throw Error(Errc::ProtocolError, fmt::format("non-command element {} in command set", tag.str()));
  }
  if (!ds.contains(tags::kCommandField)) throw Error(Errc::ProtocolError, "command set without CommandField");
  return ds;
}

void MessageChannel::send_fragments(std::uint8_t context_id, bool command, std::span<const std::uint8_t> bytes) {
  // PDV item header (4-byte length, context id, control byte) counts
  // against the peer's maximum.
  std::size_t max_data = peer_max_pdu_ == 0 ? kMaxPduBody - 6 : std::max<std::size_t>(peer_max_pdu_, 7) - 6;
  std::size_t off = 0;
  do {
    auto n = std::min(max_data, bytes.size() - off);
    PDataTf p;
    Pdv pdv;
    pdv.context_id = context_id;
    pdv.command = command;
    pdv.last = off + n == bytes.size();
    pdv.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off), bytes.begin() + static_cast<std::ptrdiff_t>(off + n));
    p.pdvs.push_back(std::move(pdv));
    write_pdu(socket_, p);
    off += n;
  } while (off < bytes.size());
}

void MessageChannel::send(std::uint8_t context_id, const DataSet& command, const Bytes* data) {
  send_fragments(context_id, true, encode_command(command));
  if (data) send_fragments(context_id, false, *data);
}

std::variant<ReceivedMessage, Pdu> MessageChannel::receive() {
  ReceivedMessage out;
  Bytes command_bytes, data_bytes;
  bool command_done = false, data_done = false, have_context = false;
  for (;;) {
    auto pdu = read_pdu(socket_);
    auto* p = std::get_if<PDataTf>(&pdu);
    if (!p) {
      if (have_context) throw Error(Errc::ProtocolError, "message interrupted by another PDU");
      return pdu;
    }
    for (auto& pdv : p->pdvs) {
      if (!have_context) {
        out.context_id = pdv.context_id;
        have_context = true;
      } else if (pdv.context_id != out.context_id) {
        throw Error(Errc::ProtocolError, "presentation context changed within a message");
      }
      if (pdv.command) {
        if (command_done) throw Error(Errc::ProtocolError, "command fragment after the last one");
        command_bytes.insert(command_bytes.end(), pdv.data.begin(), pdv.data.end());
        if (pdv.last) {
          command_done = true;
          out.message.command = decode_command(command_bytes);
          if (!out.message.announces_data()) data_done = true;
        }
      } else {
        if (!command_done) throw Error(Errc::ProtocolError, "data fragment before the command set");
        if (data_done) throw Error(Errc::ProtocolError, "unexpected data fragment");
        data_bytes.insert(data_bytes.end(), pdv.data.begin(), pdv.data.end());
        if (pdv.last) data_done = true;
      }
    }
    if (command_done && data_done) {
      if (out.message.announces_data()) out.message.data = std::move(data_bytes);
      return out;
    }
  }
}

}  // namespace minipacs::net
