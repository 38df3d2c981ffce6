// SPDX-License-Identifier: Apache-2.0
#include "minipacs/net/pdu.hpp"

#include <fmt/format.h>

#include "minipacs/error.hpp"

namespace minipacs::net {

namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(Errc::Malformed, msg); }

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_ae(Bytes& out, const std::string& ae) {
  if (ae.size() > 16) malformed(fmt::format("AE title longer than 16 bytes: \"{}\"", ae));
  out.insert(out.end(), ae.begin(), ae.end());
  out.insert(out.end(), 16 - ae.size(), ' ');
}

void put_item(Bytes& out, std::uint8_t type, std::span<const std::uint8_t> body) {
  if (body.size() > 0xFFFF) malformed("item too long");
  out.push_back(type);
  out.push_back(0);
  put_u16(out, static_cast<std::uint16_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
}

void put_item(Bytes& out, std::uint8_t type, std::string_view text) {
  put_item(out, type, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Bytes encode_associate(const AssociateBody& a, bool ac) {
  Bytes body;
  put_u16(body, a.protocol_version);
  put_u16(body, 0);
  put_ae(body, a.called_ae);
  put_ae(body, a.calling_ae);
  body.insert(body.end(), 32, 0);
  put_item(body, 0x10, a.application_context);
  for (const auto& pc : a.contexts) {
    Bytes item{pc.id, 0, ac ? static_cast<std::uint8_t>(pc.result.value_or(ContextResult::Acceptance)) : std::uint8_t{0}, 0};
    if (!ac) put_item(item, 0x30, pc.abstract_syntax);
    for (const auto& ts : pc.transfer_syntaxes) put_item(item, 0x40, ts);
    put_item(body, ac ? 0x21 : 0x20, item);
  }
  Bytes ui;
  Bytes max;
  put_u32(max, a.user_info.max_pdu_length);
  put_item(ui, 0x51, max);
  if (a.user_info.implementation_class_uid) put_item(ui, 0x52, *a.user_info.implementation_class_uid);
  if (a.user_info.implementation_version_name) put_item(ui, 0x55, *a.user_info.implementation_version_name);
  put_item(body, 0x50, ui);
  return body;
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    auto v = static_cast<std::uint16_t>(b_[pos_] << 8 | b_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | b_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == b_.size(); }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > b_.size() - pos_) malformed("item extends past the end of its container");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::string text_of(std::span<const std::uint8_t> s) {
  std::string out(s.begin(), s.end());
  while (!out.empty() && (out.back() == ' ' || out.back() == '\0')) out.pop_back();
  std::size_t lead = 0;
  while (lead < out.size() && out[lead] == ' ') ++lead;
  return out.substr(lead);
}

struct Item {
  std::uint8_t type;
  std::span<const std::uint8_t> body;
};

Item next_item(Reader& r) {
  auto type = r.u8();
  r.u8();
  auto len = r.u16();
  return {type, r.take(len)};
}

AssociateBody decode_associate(Reader& r, bool ac) {
  AssociateBody a;
  a.protocol_version = r.u16();
  r.u16();
  a.called_ae = text_of(r.take(16));
  a.calling_ae = text_of(r.take(16));
  r.take(32);
  bool have_context = false, have_user_info = false;
  while (!r.at_end()) {
    auto item = next_item(r);
    Reader ir(item.body);
    switch (item.type) {
      case 0x10:
        a.application_context = text_of(item.body);
        have_context = true;
        break;
      case 0x20:
      case 0x21: {
        if ((item.type == 0x21) != ac) malformed(fmt::format("unexpected presentation context item 0x{:02X}", item.type));
        PresentationContext pc;
        pc.id = ir.u8();
        ir.u8();
        auto result = ir.u8();
        ir.u8();
        if (ac) {
          if (result > 4) malformed(fmt::format("invalid presentation context result {}", result));
          pc.result = static_cast<ContextResult>(result);
        }
        while (!ir.at_end()) {
          auto sub = next_item(ir);
          if (sub.type == 0x30 && !ac) {
            pc.abstract_syntax = text_of(sub.body);
          } else if (sub.type == 0x40) {
            pc.transfer_syntaxes.push_back(text_of(sub.body));
          } else {
            malformed(fmt::format("unexpected presentation context sub-item 0x{:02X}", sub.type));
          }
        }
        if (!ac && pc.abstract_syntax.empty()) malformed("presentation context without abstract syntax");
        a.contexts.push_back(std::move(pc));
        break;
      }
      case 0x50: {
        have_user_info = true;
        bool have_max = false;
        while (!ir.at_end()) {
          auto sub = next_item(ir);
          if (sub.type == 0x51) {
            if (sub.body.size() != 4) malformed("maximum length sub-item must be 4 bytes");
            Reader mr(sub.body);
            a.user_info.max_pdu_length = mr.u32();
            have_max = true;
          } else if (sub.type == 0x52) {
            a.user_info.implementation_class_uid = text_of(sub.body);
          } else if (sub.type == 0x55) {
            a.user_info.implementation_version_name = text_of(sub.body);
          }
          // Other user information sub-items (role selection, extended
          // negotiation, async window) are ignored.
        }
        if (!have_max) a.user_info.max_pdu_length = 0;
        break;
      }
      default: malformed(fmt::format("unexpected association item 0x{:02X}", item.type));
    }
  }
  if (!have_context) malformed("association without application context");
  if (!have_user_info) malformed("association without user information");
  return a;
}

}  // namespace

PduType pdu_type(const Pdu& pdu) noexcept {
  static constexpr PduType kTypes[] = {PduType::AssociateRq, PduType::AssociateAc, PduType::AssociateRj,
                                       PduType::PDataTf,     PduType::ReleaseRq,   PduType::ReleaseRp,
                                       PduType::Abort};
  return kTypes[pdu.index()];
}

Bytes encode_pdu(const Pdu& pdu) {
  Bytes body = std::visit(
      [](const auto& p) -> Bytes {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AssociateRq>) {
          return encode_associate(p, false);
        } else if constexpr (std::is_same_v<T, AssociateAc>) {
          return encode_associate(p, true);
        } else if constexpr (std::is_same_v<T, AssociateRj>) {
          return Bytes{0, p.result, p.source, p.reason};
        } else if constexpr (std::is_same_v<T, PDataTf>) {
          Bytes b;
          for (const auto& pdv : p.pdvs) {
            if (pdv.data.size() > kMaxPduBody) malformed("presentation data value too long");
            put_u32(b, static_cast<std::uint32_t>(pdv.data.size() + 2));
            b.push_back(pdv.context_id);
            b.push_back(static_cast<std::uint8_t>((pdv.command ? 1 : 0) | (pdv.last ? 2 : 0)));
            b.insert(b.end(), pdv.data.begin(), pdv.data.end());
          }
          return b;
        } else if constexpr (std::is_same_v<T, Abort>) {
          return Bytes{0, 0, p.source, p.reason};
        } else {
          return Bytes{0, 0, 0, 0};
        }
      },
      pdu);
  if (body.size() > kMaxPduBody) malformed("PDU body exceeds the maximum length");
  Bytes out{static_cast<std::uint8_t>(pdu_type(pdu)), 0};
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::uint32_t pdu_body_length(std::span<const std::uint8_t, 6> header) {
  auto type = header[0];
  if (type < 0x01 || type > 0x07) throw Error(Errc::BadPduType, fmt::format("unknown PDU type 0x{:02X}", type));
  std::uint32_t len = 0;
  for (int i = 2; i < 6; ++i) len = len << 8 | header[i];
  if (len > kMaxPduBody) throw Error(Errc::Oversize, fmt::format("PDU length {} exceeds {}", len, kMaxPduBody));
  return len;
}

Pdu decode_pdu(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6) throw Error(Errc::Truncated, "PDU header incomplete");
  auto len = pdu_body_length(bytes.first<6>());
  if (bytes.size() - 6 < len) throw Error(Errc::Truncated, fmt::format("PDU body has {} of {} bytes", bytes.size() - 6, len));
  if (bytes.size() - 6 > len) malformed("bytes after the end of the PDU");
  Reader r(bytes.subspan(6, len));

  auto fixed4 = [&] {
    if (len != 4) malformed(fmt::format("PDU type 0x{:02X} must have length 4", bytes[0]));
  };

  switch (static_cast<PduType>(bytes[0])) {
    case PduType::AssociateRq: {
      AssociateRq rq;
      static_cast<AssociateBody&>(rq) = decode_associate(r, false);
      return rq;
    }
    case PduType::AssociateAc: {
      AssociateAc ac;
      static_cast<AssociateBody&>(ac) = decode_associate(r, true);
      return ac;
    }
    case PduType::AssociateRj: {
      fixed4();
      r.u8();
      AssociateRj rj;
      rj.result = r.u8();
      rj.source = r.u8();
      rj.reason = r.u8();
      return rj;
    }
    case PduType::PDataTf: {
      PDataTf p;
      while (!r.at_end()) {
        auto item_len = r.u32();
        if (item_len < 2) malformed("presentation data value shorter than its header");
        Pdv pdv;
        pdv.context_id = r.u8();
        auto control = r.u8();
        if (control & 0xFC) malformed(fmt::format("invalid message control header 0x{:02X}", control));
        pdv.command = control & 1;
        pdv.last = control & 2;
        auto data = r.take(item_len - 2);
        pdv.data.assign(data.begin(), data.end());
        p.pdvs.push_back(std::move(pdv));
      }
      if (p.pdvs.empty()) malformed("P-DATA-TF without presentation data values");
      return p;
    }
    case PduType::ReleaseRq: fixed4(); return ReleaseRq{};
    case PduType::ReleaseRp: fixed4(); return ReleaseRp{};
    case PduType::Abort: {
      fixed4();
      r.u8();
      r.u8();
      Abort a;
      a.source = r.u8();
      a.reason = r.u8();
      return a;
    }
  }
  throw Error(Errc::BadPduType, "unknown PDU type");
}

}  // namespace minipacs::net
