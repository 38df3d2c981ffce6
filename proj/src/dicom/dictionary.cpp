// SPDX-License-Identifier: Apache-2.0
#include "minipacs/dicom/dictionary.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

namespace minipacs::dicom {

namespace {

// Generated by scripts/gen_dictionary.py; sorted by tag.
constexpr DictEntry kEntries[] = {
#include "dictionary_table.inc"
};

const std::unordered_map<std::string_view, const DictEntry*>& keyword_index() {
  static const auto index = [] {
    std::unordered_map<std::string_view, const DictEntry*> m;
    for (const auto& e : kEntries) m.emplace(e.keyword, &e);
    return m;
  }();
  return index;
}

}  // namespace

std::span<const DictEntry> dictionary_entries() { return kEntries; }

std::optional<DictEntry> dict_lookup(Tag tag) {
  auto it = std::lower_bound(std::begin(kEntries), std::end(kEntries), tag,
                             [](const DictEntry& e, Tag t) { return e.tag < t; });
  if (it == std::end(kEntries) || it->tag != tag) return std::nullopt;
  return *it;
}

std::optional<DictEntry> dict_lookup(std::string_view keyword) {
  const auto& index = keyword_index();
  auto it = index.find(keyword);
  if (it == index.end()) return std::nullopt;
  return *it->second;
}

std::string keyword_or_hex(Tag tag) {
  if (auto e = dict_lookup(tag)) return std::string(e->keyword);
  return tag.str();
}

std::optional<Tag> tag_for_key(std::string_view key) {
  if (auto e = dict_lookup(key)) return e->tag;
  return Tag::parse(key);
}

Vr implicit_vr(Tag tag) {
  if (auto e = dict_lookup(tag)) return e->vr;
  if (tag.is_group_length()) return Vr::UL;
  return Vr::UN;
}

}  // namespace minipacs::dicom
