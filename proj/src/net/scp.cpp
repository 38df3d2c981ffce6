// SPDX-License-Identifier: Apache-2.0
#include "minipacs/net/scp.hpp"

#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "minipacs/dicom/codec.hpp"
#include "minipacs/dicom/uids.hpp"
#include "minipacs/error.hpp"
#include "minipacs/net/find.hpp"

namespace minipacs::net {

namespace uids = dicom::uids;

namespace {

bool supported_abstract_syntax(std::string_view uid) {
  return uid == uids::kVerification || uid == uids::kStudyRootFind || uids::is_storage_sop_class(uid);
}

const PresentationContext* accepted_context(const AssociateAc& ac, std::uint8_t id) {
  for (const auto& pc : ac.contexts) {
    if (pc.id == id && pc.result == ContextResult::Acceptance) return &pc;
  }
  return nullptr;
}

/// Thrown to end an association with an A-ABORT.
struct AbortAssociation {
  std::string reason;
};

}  // namespace

std::variant<AssociateAc, AssociateRj> negotiate_association(const AssociateRq& rq, std::string_view aetitle) {
  if (rq.called_ae != aetitle) return AssociateRj{1, 1, 7};
  if (rq.application_context != uids::kApplicationContext) return AssociateRj{1, 1, 2};

  AssociateAc ac;
  ac.protocol_version = 1;
  ac.called_ae = rq.called_ae;
  ac.calling_ae = rq.calling_ae;
  ac.application_context = std::string(uids::kApplicationContext);
  ac.user_info.max_pdu_length = kAdvertisedMaxPdu;
  ac.user_info.implementation_class_uid = std::string(uids::kImplementationClass);
  ac.user_info.implementation_version_name = "MINIPACS_1";

  std::set<std::uint8_t> ids;
  for (const auto& pc : rq.contexts) {
    if (pc.id % 2 == 0) throw Error(Errc::ProtocolError, fmt::format("even presentation context id {}", pc.id));
    if (!ids.insert(pc.id).second) throw Error(Errc::ProtocolError, fmt::format("repeated presentation context id {}", pc.id));
    PresentationContext out;
    out.id = pc.id;
    auto offered = [&](std::string_view ts) {
      return std::find(pc.transfer_syntaxes.begin(), pc.transfer_syntaxes.end(), ts) != pc.transfer_syntaxes.end();
    };
    if (!supported_abstract_syntax(pc.abstract_syntax)) {
      out.result = ContextResult::AbstractSyntaxNotSupported;
      out.transfer_syntaxes = {std::string(uids::kImplicitVrLittleEndian)};
    } else if (offered(uids::kExplicitVrLittleEndian)) {
      out.result = ContextResult::Acceptance;
      out.transfer_syntaxes = {std::string(uids::kExplicitVrLittleEndian)};
    } else if (offered(uids::kImplicitVrLittleEndian)) {
      out.result = ContextResult::Acceptance;
      out.transfer_syntaxes = {std::string(uids::kImplicitVrLittleEndian)};
    } else {
      out.result = ContextResult::TransferSyntaxesNotSupported;
      out.transfer_syntaxes = {std::string(uids::kImplicitVrLittleEndian)};
    }
    ac.contexts.push_back(std::move(out));
  }
  return ac;
}

DimseServer::DimseServer(ScpConfig config, ScpHandlers& handlers) : config_(std::move(config)), handlers_(handlers) {}

DimseServer::~DimseServer() { stop(); }

void DimseServer::start() {
  listener_ = Listener::bind(config_.host, config_.port);
  listener_port_ = listener_.port();
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void DimseServer::stop() {
  if (!running_.exchange(false)) return;
  listener_.close();
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(connections_mutex_);
    for (auto& c : connections_) c->socket.shutdown();
  }
  reap(true);
}

void DimseServer::reap(bool all) {
  std::list<std::unique_ptr<Connection>> finished;
  {
    std::lock_guard lock(connections_mutex_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (all || (*it)->done) {
        finished.push_back(std::move(*it));
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& c : finished) {
    if (c->thread.joinable()) c->thread.join();
  }
}

void DimseServer::accept_loop() {
  while (running_) {
    Socket s;
    try {
      s = listener_.accept();
    } catch (const Error&) {
      if (!running_) break;
      continue;
    }
    if (!running_) break;
    reap(false);
    auto conn = std::make_unique<Connection>();
    conn->socket = std::move(s);
    auto* raw = conn.get();
    std::lock_guard lock(connections_mutex_);
    connections_.push_back(std::move(conn));
    raw->thread = std::thread([this, raw] {
      serve_connection(raw->socket);
      raw->socket.close();
      raw->done = true;
    });
  }
}

void DimseServer::serve_connection(Socket& socket) {
  socket.set_receive_timeout(config_.idle_timeout);
  auto send_abort = [&](const std::string& why) {
    spdlog::warn("dimse: aborting association: {}", why);
    try {
      write_pdu(socket, Abort{2, 0});
    } catch (const std::exception&) {
    }
  };

  try {
    auto first = read_pdu(socket);
    auto* rq = std::get_if<AssociateRq>(&first);
    if (!rq) {
      send_abort("expected A-ASSOCIATE-RQ");
      return;
    }
    auto result = negotiate_association(*rq, config_.aetitle);
    if (auto* rj = std::get_if<AssociateRj>(&result)) {
      spdlog::info("dimse: rejected association from \"{}\" to \"{}\"", rq->calling_ae, rq->called_ae);
      write_pdu(socket, *rj);
      return;
    }
    const auto ac = std::get<AssociateAc>(result);
    write_pdu(socket, ac);
    MessageChannel channel(socket, rq->user_info.max_pdu_length);

    for (;;) {
      auto next = channel.receive();
      if (auto* rx = std::get_if<ReceivedMessage>(&next)) {
        if (!handle_message(channel, *rx, ac)) return;
        continue;
      }
      auto& pdu = std::get<Pdu>(next);
      if (std::holds_alternative<ReleaseRq>(pdu)) {
        write_pdu(socket, ReleaseRp{});
        return;  // nothing is sent after A-RELEASE-RP
      }
      if (std::holds_alternative<Abort>(pdu)) return;
      send_abort("unexpected PDU during association");
      return;
    }
  } catch (const AbortAssociation& a) {
    send_abort(a.reason);
  } catch (const Error& e) {
    if (e.code() == Errc::IoFailure) {
      spdlog::debug("dimse: connection ended: {}", e.what());
    } else {
      send_abort(e.what());
    }
  } catch (const std::exception& e) {
    send_abort(e.what());
  }
}

bool DimseServer::handle_message(MessageChannel& channel, const ReceivedMessage& rx, const AssociateAc& ac) {
  const auto* pc = accepted_context(ac, rx.context_id);
  if (!pc) throw AbortAssociation{fmt::format("message on unaccepted presentation context {}", rx.context_id)};
  const auto& msg = rx.message;
  const auto& ts = pc->transfer_syntaxes.front();

  switch (msg.command_field()) {
    case command::kCEchoRq: {
      if (msg.announces_data()) throw AbortAssociation{"C-ECHO-RQ announces a data set"};
      channel.send(rx.context_id, make_response(msg, command::kCEchoRsp, status::kSuccess, false));
      return true;
    }
    case command::kCStoreRq: {
      if (!msg.data) throw AbortAssociation{"C-STORE-RQ without a data set"};
      std::uint16_t code = status::kSuccess;
      std::optional<dicom::DicomObject> obj;
      try {
        auto ds = dicom::decode_dataset(*msg.data, dicom::syntax_from_uid(ts));
        obj = dicom::DicomObject::from_dataset(std::move(ds), ts);
      } catch (const Error& e) {
        spdlog::warn("dimse: C-STORE data set rejected: {}", e.what());
        code = status::kCannotUnderstand;
      }
      if (obj) code = handlers_.on_store(*obj);
      channel.send(rx.context_id, make_response(msg, command::kCStoreRsp, code, false));
      return true;
    }
    case command::kCFindRq: {
      if (!msg.data) throw AbortAssociation{"C-FIND-RQ without an identifier"};
      FindOutcome outcome;
      try {
        auto identifier = dicom::decode_dataset(*msg.data, dicom::syntax_from_uid(ts));
        outcome = handlers_.on_find(identifier);
      } catch (const Error& e) {
        spdlog::warn("dimse: C-FIND identifier rejected: {}", e.what());
        outcome.status = status::kCannotUnderstand;
      }
      auto syntax = dicom::syntax_from_uid(ts);
      for (const auto& match : outcome.matches) {
        auto bytes = dicom::encode_dataset(match, syntax);
        channel.send(rx.context_id, make_response(msg, command::kCFindRsp, status::kPending, true), &bytes);
      }
      channel.send(rx.context_id, make_response(msg, command::kCFindRsp, outcome.status, false));
      return true;
    }
    case command::kCCancelRq:
      return true;  // responses are sent synchronously; nothing left to cancel
    default:
      throw AbortAssociation{fmt::format("unsupported command 0x{:04X}", msg.command_field())};
  }
}

}  // namespace minipacs::net
