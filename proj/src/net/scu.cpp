// SPDX-License-Identifier: Apache-2.0
#include "minipacs/net/scu.hpp"

#include <fmt/format.h>

#include "minipacs/dicom/codec.hpp"
#include "minipacs/dicom/uids.hpp"
#include "minipacs/error.hpp"

namespace minipacs::net {

namespace uids = dicom::uids;

std::vector<PresentationContext> propose_contexts(const std::vector<std::string>& abstract_syntaxes) {
  std::vector<PresentationContext> out;
  std::uint8_t id = 1;
  for (const auto& as : abstract_syntaxes) {
    out.push_back({id, as, {std::string(uids::kExplicitVrLittleEndian), std::string(uids::kImplicitVrLittleEndian)}, {}});
    id = static_cast<std::uint8_t>(id + 2);
  }
  return out;
}

DimseClient::DimseClient(Socket socket, AssociateRq rq, AssociateAc ac)
    : socket_(std::move(socket)), rq_(std::move(rq)), ac_(std::move(ac)) {}

DimseClient::~DimseClient() {
  if (open_ && socket_.valid()) {
    try {
      abort();
    } catch (...) {
    }
  }
}

DimseClient DimseClient::connect(const std::string& host, std::uint16_t port, const std::string& calling_ae,
                                 const std::string& called_ae, std::vector<PresentationContext> contexts) {
  auto socket = Socket::connect(host, port);
  socket.set_receive_timeout(std::chrono::seconds(30));
  AssociateRq rq;
  rq.called_ae = called_ae;
  rq.calling_ae = calling_ae;
  rq.contexts = std::move(contexts);
  rq.user_info.implementation_class_uid = std::string(uids::kImplementationClass);
  rq.user_info.implementation_version_name = "MINIPACS_1";
  write_pdu(socket, rq);
  auto reply = read_pdu(socket);
  if (auto* rj = std::get_if<AssociateRj>(&reply))
    throw Error(Errc::ProtocolError,
                fmt::format("association rejected (result {}, source {}, reason {})", rj->result, rj->source, rj->reason));
  auto* ac = std::get_if<AssociateAc>(&reply);
  if (!ac) throw Error(Errc::ProtocolError, "association aborted by peer");
  return DimseClient(std::move(socket), std::move(rq), std::move(*ac));
}

std::optional<std::pair<std::uint8_t, std::string>> DimseClient::context_for(std::string_view abstract_syntax) const {
  for (const auto& proposed : rq_.contexts) {
    if (proposed.abstract_syntax != abstract_syntax) continue;
    for (const auto& pc : ac_.contexts) {
      if (pc.id == proposed.id && pc.result == ContextResult::Acceptance && !pc.transfer_syntaxes.empty())
        return std::make_pair(pc.id, pc.transfer_syntaxes.front());
    }
  }
  return std::nullopt;
}

ReceivedMessage DimseClient::expect_message() {
  MessageChannel channel(socket_, ac_.user_info.max_pdu_length);
  auto next = channel.receive();
  if (auto* rx = std::get_if<ReceivedMessage>(&next)) return std::move(*rx);
  open_ = false;
  throw Error(Errc::ProtocolError, "peer ended the association during an operation");
}

std::uint16_t DimseClient::echo() {
  auto ctx = context_for(uids::kVerification);
  if (!ctx) throw Error(Errc::ProtocolError, "no accepted Verification context");
  MessageChannel channel(socket_, ac_.user_info.max_pdu_length);
  channel.send(ctx->first, make_command(command::kCEchoRq, next_id_++, uids::kVerification, false));
  return expect_message().message.status();
}

std::uint16_t DimseClient::store(const dicom::DicomObject& obj) {
  auto sop_class = dicom::get_value_string(obj.dataset(), dicom::tags::kSopClassUid).value_or("");
  auto ctx = context_for(sop_class);
  if (!ctx) throw Error(Errc::ProtocolError, fmt::format("no accepted context for {}", sop_class));
  auto cmd = make_command(command::kCStoreRq, next_id_++, sop_class, true);
  cmd.set(dicom::DataElement::text(dicom::tags::kAffectedSopInstanceUid, dicom::Vr::UI, obj.sop_instance_uid()));
  cmd.set(dicom::DataElement::integers(dicom::tags::kPriority, dicom::Vr::US, {0}));
  auto data = dicom::encode_dataset(obj.dataset(), dicom::syntax_from_uid(ctx->second));
  MessageChannel channel(socket_, ac_.user_info.max_pdu_length);
  channel.send(ctx->first, cmd, &data);
  return expect_message().message.status();
}

std::pair<std::uint16_t, std::vector<dicom::DataSet>> DimseClient::find(const dicom::DataSet& identifier) {
  auto ctx = context_for(uids::kStudyRootFind);
  if (!ctx) throw Error(Errc::ProtocolError, "no accepted Study Root FIND context");
  auto cmd = make_command(command::kCFindRq, next_id_++, uids::kStudyRootFind, true);
  cmd.set(dicom::DataElement::integers(dicom::tags::kPriority, dicom::Vr::US, {0}));
  auto syntax = dicom::syntax_from_uid(ctx->second);
  auto data = dicom::encode_dataset(identifier, syntax);
  MessageChannel channel(socket_, ac_.user_info.max_pdu_length);
  channel.send(ctx->first, cmd, &data);
  std::vector<dicom::DataSet> matches;
  for (;;) {
    auto rx = expect_message();
    auto st = rx.message.status();
    if (st == status::kPending || st == 0xFF01) {
      if (rx.message.data) matches.push_back(dicom::decode_dataset(*rx.message.data, syntax));
      continue;
    }
    return {st, std::move(matches)};
  }
}

void DimseClient::release() {
  if (!open_) return;
  write_pdu(socket_, ReleaseRq{});
  auto reply = read_pdu(socket_);
  open_ = false;
  if (!std::holds_alternative<ReleaseRp>(reply)) throw Error(Errc::ProtocolError, "expected A-RELEASE-RP");
}

void DimseClient::abort() {
  if (!open_) return;
  open_ = false;
  write_pdu(socket_, Abort{0, 0});
}

}  // namespace minipacs::net
