// SPDX-License-Identifier: Apache-2.0
#include "minipacs/dicom/tag.hpp"

#include <charconv>

#include <fmt/format.h>

namespace minipacs::dicom {

std::string Tag::str() const { return fmt::format("{:04X}{:04X}", group, element); }

std::optional<Tag> Tag::parse(std::string_view text) {
  if (text.size() != 8) return std::nullopt;
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return Tag::from_value(v);
}

}  // namespace minipacs::dicom
