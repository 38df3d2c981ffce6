// SPDX-License-Identifier: Apache-2.0
#include "minipacs/dicom/codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>

#include <fmt/format.h>

#include "minipacs/dicom/dictionary.hpp"
#include "minipacs/dicom/uids.hpp"
#include "minipacs/error.hpp"

namespace minipacs::dicom {

static_assert(std::endian::native == std::endian::little, "codec assumes a little-endian host");

namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFF;
constexpr int kMaxNesting = 32;
constexpr std::size_t kPreambleSize = 128;

// VRs outside the supported set that still use the 4-byte length form;
// their values are kept as UN bytes.
bool is_unsupported_long_vr(std::string_view code) {
  static constexpr std::string_view kLong[] = {"OD", "OF", "OL", "OV", "SV", "UV", "UC", "UR"};
  return std::find(std::begin(kLong), std::end(kLong), code) != std::end(kLong);
}

Tag read_tag(ByteReader& r) {
  auto group = r.u16();
  auto element = r.u16();
  return Tag{group, element};
}

DataElement decode_element_at(ByteReader& r, Syntax syntax, int depth);

DataSet decode_dataset_defined(std::span<const std::uint8_t> bytes, Syntax syntax, int depth) {
  DataSet ds;
  ByteReader r(bytes);
  while (!r.at_end()) ds.set(decode_element_at(r, syntax, depth));
  return ds;
}

DataSet decode_dataset_until_item_delimiter(ByteReader& r, Syntax syntax, int depth) {
  DataSet ds;
  while (true) {
    Tag tag;
    if (!r.peek_tag(tag)) throw Error(Errc::Truncated, "stream ended inside an undefined-length item");
    if (tag == tags::kItemDelimitation) {
      r.skip(4);
      r.u32();
      return ds;
    }
    ds.set(decode_element_at(r, syntax, depth));
  }
}

DataSet decode_item(ByteReader& r, Syntax syntax, int depth) {
  auto length = r.u32();
  if (length == kUndefinedLength) return decode_dataset_until_item_delimiter(r, syntax, depth);
  if (length > r.remaining()) throw Error(Errc::BadLength, fmt::format("item length {} exceeds remaining {}", length, r.remaining()));
  return decode_dataset_defined(r.take(length), syntax, depth);
}

Items decode_items_defined(std::span<const std::uint8_t> bytes, Syntax syntax, int depth) {
  Items items;
  ByteReader r(bytes);
  while (!r.at_end()) {
    auto tag = read_tag(r);
    if (tag != tags::kItem) throw Error(Errc::InvalidObject, fmt::format("expected item tag in sequence, found {}", tag.str()));
    items.push_back(decode_item(r, syntax, depth));
  }
  return items;
}

Items decode_items_undefined(ByteReader& r, Syntax syntax, int depth) {
  Items items;
  while (true) {
    auto tag = read_tag(r);
    if (tag == tags::kSequenceDelimitation) {
      r.u32();
      return items;
    }
    if (tag != tags::kItem) throw Error(Errc::InvalidObject, fmt::format("expected item tag in sequence, found {}", tag.str()));
    items.push_back(decode_item(r, syntax, depth));
  }
}

Strings decode_text(Vr vr, std::span<const std::uint8_t> bytes) {
  std::string raw(bytes.begin(), bytes.end());
  while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\0')) raw.pop_back();
  Strings values;
  if (raw.empty()) return values;
  if (!is_multi_valued_text(vr)) {
    values.push_back(std::move(raw));
    return values;
  }
  std::size_t start = 0;
  while (true) {
    auto pos = raw.find('\\', start);
    values.push_back(raw.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return values;
}

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

DataElement decode_value(Tag tag, Vr vr, std::span<const std::uint8_t> bytes, Syntax syntax, int depth) {
  switch (value_class(vr)) {
    case ValueClass::Text:
      return DataElement(tag, vr, decode_text(vr, bytes));
    case ValueClass::Bytes:
      return DataElement(tag, vr, Bytes(bytes.begin(), bytes.end()));
    case ValueClass::Items:
      return DataElement(tag, vr, decode_items_defined(bytes, syntax, depth + 1));
    case ValueClass::Integer:
    case ValueClass::Decimal:
      break;
  }
  auto width = binary_width(vr);
  if (bytes.size() % width != 0) {
    throw Error(Errc::BadLength, fmt::format("element {} {} length {} is not a multiple of {}", tag.str(), vr_name(vr), bytes.size(), width));
  }
  const auto count = bytes.size() / width;
  const auto* p = bytes.data();
  if (value_class(vr) == ValueClass::Decimal) {
    Decimals values;
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i, p += width) {
      values.push_back(vr == Vr::FL ? static_cast<double>(load<float>(p)) : load<double>(p));
    }
    return DataElement(tag, vr, std::move(values));
  }
  Integers values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i, p += width) {
    switch (vr) {
      case Vr::US: values.push_back(load<std::uint16_t>(p)); break;
      case Vr::SS: values.push_back(load<std::int16_t>(p)); break;
      case Vr::UL: values.push_back(load<std::uint32_t>(p)); break;
      case Vr::SL: values.push_back(load<std::int32_t>(p)); break;
      default:  // AT
        values.push_back((static_cast<std::int64_t>(load<std::uint16_t>(p)) << 16) | load<std::uint16_t>(p + 2));
        break;
    }
  }
  return DataElement(tag, vr, std::move(values));
}

DataElement decode_element_at(ByteReader& r, Syntax syntax, int depth) {
  if (depth > kMaxNesting) throw Error(Errc::InvalidObject, "sequence nesting too deep");
  const auto tag = read_tag(r);
  if (tag.group == 0xFFFE) throw Error(Errc::InvalidObject, fmt::format("unexpected delimiter {} outside a sequence", tag.str()));

  Vr vr;
  std::uint32_t length;
  if (syntax == Syntax::ExplicitLittle) {
    auto code_bytes = r.take(2);
    std::string_view code(reinterpret_cast<const char*>(code_bytes.data()), 2);
    if (auto parsed = parse_vr(code)) {
      vr = *parsed;
      if (has_long_length(vr)) {
        r.skip(2);
        length = r.u32();
      } else {
        length = r.u16();
      }
    } else if (is_unsupported_long_vr(code)) {
      vr = Vr::UN;
      r.skip(2);
      length = r.u32();
    } else {
      throw Error(Errc::BadVr, fmt::format("element {} has unknown VR code", tag.str()));
    }
  } else {
    vr = implicit_vr(tag);
    length = r.u32();
  }

  if (length == kUndefinedLength) {
    if (vr != Vr::SQ && vr != Vr::UN) {
      throw Error(Errc::BadLength, fmt::format("undefined length on non-sequence element {}", tag.str()));
    }
    // Undefined-length UN content is an implicit-LE sequence.
    auto item_syntax = vr == Vr::UN ? Syntax::ImplicitLittle : syntax;
    return DataElement(tag, Vr::SQ, decode_items_undefined(r, item_syntax, depth + 1));
  }
  if (length > r.remaining()) {
    throw Error(Errc::BadLength, fmt::format("element {} length {} exceeds remaining {} bytes", tag.str(), length, r.remaining()));
  }
  return decode_value(tag, vr, r.take(length), syntax, depth);
}

// ---- encoding -------------------------------------------------------------

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

template <typename T>
void put_raw(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

void put_tag(std::vector<std::uint8_t>& out, Tag tag) {
  put_u16(out, tag.group);
  put_u16(out, tag.element);
}

void check_range(const DataElement& e, std::int64_t v, std::int64_t lo, std::int64_t hi) {
  if (v < lo || v > hi) {
    throw Error(Errc::UnencodableValue, fmt::format("value {} out of range for {} {}", v, e.tag().str(), vr_name(e.vr())));
  }
}

std::vector<std::uint8_t> encode_value(const DataElement& e, Syntax syntax) {
  std::vector<std::uint8_t> out;
  const auto vr = e.vr();
  if (const auto* s = e.strings()) {
    for (std::size_t i = 0; i < s->size(); ++i) {
      if (i != 0) out.push_back('\\');
      out.insert(out.end(), (*s)[i].begin(), (*s)[i].end());
    }
    if (out.size() % 2 != 0) out.push_back(vr == Vr::UI ? '\0' : ' ');
  } else if (const auto* ints = e.integer_values()) {
    for (auto v : *ints) {
      switch (vr) {
        case Vr::US: check_range(e, v, 0, 0xFFFF); put_u16(out, static_cast<std::uint16_t>(v)); break;
        case Vr::SS: check_range(e, v, INT16_MIN, INT16_MAX); put_raw(out, static_cast<std::int16_t>(v)); break;
        case Vr::UL: check_range(e, v, 0, 0xFFFFFFFF); put_u32(out, static_cast<std::uint32_t>(v)); break;
        case Vr::SL: check_range(e, v, INT32_MIN, INT32_MAX); put_raw(out, static_cast<std::int32_t>(v)); break;
        default:
          check_range(e, v, 0, 0xFFFFFFFF);
          put_tag(out, Tag::from_value(static_cast<std::uint32_t>(v)));
          break;
      }
    }
  } else if (const auto* ds = e.decimal_values()) {
    for (auto v : *ds) {
      if (vr == Vr::FL) put_raw(out, static_cast<float>(v));
      else put_raw(out, v);
    }
  } else if (const auto* b = e.byte_values()) {
    out = *b;
    if (out.size() % 2 != 0) out.push_back(0);
  } else if (const auto* items = e.items()) {
    for (const auto& item : *items) {
      auto body = encode_dataset(item, syntax);
      if (body.size() > 0xFFFFFFFEu) throw Error(Errc::UnencodableValue, "item too large");
      put_tag(out, tags::kItem);
      put_u32(out, static_cast<std::uint32_t>(body.size()));
      out.insert(out.end(), body.begin(), body.end());
    }
  }
  return out;
}

}  // namespace

Syntax syntax_from_uid(std::string_view uid) {
  if (uid == uids::kExplicitVrLittleEndian) return Syntax::ExplicitLittle;
  if (uid == uids::kImplicitVrLittleEndian) return Syntax::ImplicitLittle;
  throw Error(Errc::UnsupportedTransferSyntax, fmt::format("transfer syntax '{}' is not supported", uid));
}

std::string_view syntax_uid(Syntax syntax) noexcept {
  return syntax == Syntax::ExplicitLittle ? uids::kExplicitVrLittleEndian : uids::kImplicitVrLittleEndian;
}

std::uint16_t ByteReader::u16() {
  auto b = take(2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t ByteReader::u32() {
  auto b = take(4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
  if (n > remaining()) {
    throw Error(Errc::Truncated, fmt::format("needed {} bytes at offset {}, {} remain", n, pos_, remaining()));
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

bool ByteReader::peek_tag(Tag& out) const noexcept {
  if (remaining() < 4) return false;
  const auto* p = data_.data() + pos_;
  out = Tag{static_cast<std::uint16_t>(p[0] | (p[1] << 8)), static_cast<std::uint16_t>(p[2] | (p[3] << 8))};
  return true;
}

DataElement decode_element(ByteReader& reader, Syntax syntax) { return decode_element_at(reader, syntax, 0); }

DataElement decode_element(ByteReader& reader, std::string_view uid) {
  return decode_element_at(reader, syntax_from_uid(uid), 0);
}

void encode_element(std::vector<std::uint8_t>& out, const DataElement& element, Syntax syntax) {
  auto value = encode_value(element, syntax);
  if (value.size() > 0xFFFFFFFEu) throw Error(Errc::UnencodableValue, fmt::format("element {} too large", element.tag().str()));
  const auto length = static_cast<std::uint32_t>(value.size());
  put_tag(out, element.tag());
  if (syntax == Syntax::ExplicitLittle) {
    auto name = vr_name(element.vr());
    out.insert(out.end(), name.begin(), name.end());
    if (has_long_length(element.vr())) {
      put_u16(out, 0);
      put_u32(out, length);
    } else {
      if (length > 0xFFFF) {
        throw Error(Errc::UnencodableValue,
                    fmt::format("element {} {} length {} does not fit a 16-bit length", element.tag().str(), name, length));
      }
      put_u16(out, static_cast<std::uint16_t>(length));
    }
  } else {
    put_u32(out, length);
  }
  out.insert(out.end(), value.begin(), value.end());
}

DataSet decode_dataset(std::span<const std::uint8_t> bytes, Syntax syntax) {
  return decode_dataset_defined(bytes, syntax, 0);
}

std::vector<std::uint8_t> encode_dataset(const DataSet& ds, Syntax syntax) {
  std::vector<std::uint8_t> out;
  for (const auto& [_, element] : ds) encode_element(out, element, syntax);
  return out;
}

bool has_part10_magic(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= kPreambleSize + 4 && bytes[128] == 'D' && bytes[129] == 'I' && bytes[130] == 'C' &&
         bytes[131] == 'M';
}

DicomObject parse_object(std::span<const std::uint8_t> bytes) {
  if (!has_part10_magic(bytes)) throw Error(Errc::MissingMagic, "no DICM magic at offset 128");
  ByteReader r(bytes.subspan(kPreambleSize + 4));
  DataSet meta;
  Tag next;
  while (r.peek_tag(next) && next.group == 0x0002) meta.set(decode_element(r, Syntax::ExplicitLittle));
  auto ts = get_value_string(meta, tags::kTransferSyntaxUid);
  if (!ts) throw Error(Errc::InvalidObject, "file meta lacks TransferSyntaxUID");
  const auto syntax = syntax_from_uid(*ts);
  DataSet dataset;
  while (!r.at_end()) {
    auto element = decode_element(r, syntax);
    if (element.tag().group == 0x0002) throw Error(Errc::InvalidObject, "meta element after dataset start");
    dataset.set(std::move(element));
  }
  return DicomObject(std::move(meta), std::move(dataset));
}

std::vector<std::uint8_t> serialize_object(const DicomObject& obj, std::string_view uid) {
  const auto syntax = syntax_from_uid(uid);
  DataSet meta = obj.meta();
  meta.set(DataElement::text(tags::kTransferSyntaxUid, Vr::UI, std::string(uid)));
  auto meta_body = encode_dataset(meta, Syntax::ExplicitLittle);

  std::vector<std::uint8_t> out(kPreambleSize, 0);
  out.insert(out.end(), {'D', 'I', 'C', 'M'});
  encode_element(out, DataElement::integers(tags::kFileMetaGroupLength, Vr::UL, {static_cast<std::int64_t>(meta_body.size())}),
                 Syntax::ExplicitLittle);
  out.insert(out.end(), meta_body.begin(), meta_body.end());
  auto body = encode_dataset(obj.dataset(), syntax);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

}  // namespace minipacs::dicom
