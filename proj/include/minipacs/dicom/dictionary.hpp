// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "minipacs/dicom/tag.hpp"
#include "minipacs/dicom/vr.hpp"

namespace minipacs::dicom {

struct DictEntry {
  Tag tag;
  std::string_view keyword;
  Vr vr;

  bool operator==(const DictEntry&) const = default;
};

std::optional<DictEntry> dict_lookup(Tag tag);
std::optional<DictEntry> dict_lookup(std::string_view keyword);

/// All built-in entries in ascending tag order.
std::span<const DictEntry> dictionary_entries();

/// Dictionary keyword for known tags, "ggggeeee" otherwise.
std::string keyword_or_hex(Tag tag);

/// Inverse of keyword_or_hex: a keyword or an eight-digit hex tag.
std::optional<Tag> tag_for_key(std::string_view key);

/// VR for implicit-syntax decoding: dictionary VR, UL for group lengths,
/// UN for anything unknown.
Vr implicit_vr(Tag tag);

}  // namespace minipacs::dicom
