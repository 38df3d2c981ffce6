// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "minipacs/dicom/dataset.hpp"

namespace minipacs::dicom {

enum class Syntax { ImplicitLittle, ExplicitLittle };

/// Throws Error(UnsupportedTransferSyntax) for anything but the two
/// uncompressed little-endian syntaxes.
Syntax syntax_from_uid(std::string_view uid);
std::string_view syntax_uid(Syntax syntax) noexcept;

/// Forward-only cursor over an immutable byte buffer.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool at_end() const noexcept { return pos_ >= data_.size(); }

  /// Each read throws Error(Truncated) when fewer bytes remain.
  std::uint16_t u16();
  std::uint32_t u32();
  std::span<const std::uint8_t> take(std::size_t n);
  void skip(std::size_t n) { take(n); }

  /// Peeks a little-endian tag without consuming it.
  bool peek_tag(Tag& out) const noexcept;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

/// Decodes one element at the reader's position. Explicit syntax reads the
/// VR from the stream; implicit syntax resolves it from the dictionary.
DataElement decode_element(ByteReader& reader, Syntax syntax);
DataElement decode_element(ByteReader& reader, std::string_view syntax_uid);

void encode_element(std::vector<std::uint8_t>& out, const DataElement& element, Syntax syntax);

/// A bare dataset (no preamble or meta), as carried in DIMSE messages.
DataSet decode_dataset(std::span<const std::uint8_t> bytes, Syntax syntax);
std::vector<std::uint8_t> encode_dataset(const DataSet& ds, Syntax syntax);

/// Parses a Part-10 file. Errors: MissingMagic, UnsupportedTransferSyntax,
/// Truncated, BadLength, BadVr, InvalidObject.
DicomObject parse_object(std::span<const std::uint8_t> bytes);

/// Preamble, magic, explicit-LE meta (group length recomputed,
/// TransferSyntaxUID set to `syntax_uid`), then the dataset in that syntax.
std::vector<std::uint8_t> serialize_object(const DicomObject& obj, std::string_view syntax_uid);

/// True when the buffer opens with a 128-byte preamble followed by "DICM".
bool has_part10_magic(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace minipacs::dicom
