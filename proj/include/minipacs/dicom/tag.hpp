// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace minipacs::dicom {

struct Tag {
  std::uint16_t group = 0;
  std::uint16_t element = 0;

  constexpr auto operator<=>(const Tag&) const = default;

  constexpr std::uint32_t value() const noexcept {
    return (static_cast<std::uint32_t>(group) << 16) | element;
  }
  static constexpr Tag from_value(std::uint32_t v) noexcept {
    return Tag{static_cast<std::uint16_t>(v >> 16), static_cast<std::uint16_t>(v & 0xFFFF)};
  }

  constexpr bool is_private() const noexcept { return (group & 1) != 0; }
  constexpr bool is_group_length() const noexcept { return element == 0; }

  /// Eight uppercase hex digits, e.g. "00080060".
  std::string str() const;

  /// Accepts exactly eight hex digits (either case).
  static std::optional<Tag> parse(std::string_view text);
};

namespace tags {
inline constexpr Tag kCommandGroupLength{0x0000, 0x0000};
inline constexpr Tag kAffectedSopClassUid{0x0000, 0x0002};
inline constexpr Tag kCommandField{0x0000, 0x0100};
inline constexpr Tag kMessageId{0x0000, 0x0110};
inline constexpr Tag kMessageIdBeingRespondedTo{0x0000, 0x0120};
inline constexpr Tag kPriority{0x0000, 0x0700};
inline constexpr Tag kCommandDataSetType{0x0000, 0x0800};
inline constexpr Tag kStatus{0x0000, 0x0900};
inline constexpr Tag kErrorComment{0x0000, 0x0902};
inline constexpr Tag kAffectedSopInstanceUid{0x0000, 0x1000};

inline constexpr Tag kFileMetaGroupLength{0x0002, 0x0000};
inline constexpr Tag kFileMetaVersion{0x0002, 0x0001};
inline constexpr Tag kMediaStorageSopClassUid{0x0002, 0x0002};
inline constexpr Tag kMediaStorageSopInstanceUid{0x0002, 0x0003};
inline constexpr Tag kTransferSyntaxUid{0x0002, 0x0010};
inline constexpr Tag kImplementationClassUid{0x0002, 0x0012};
inline constexpr Tag kImplementationVersionName{0x0002, 0x0013};

inline constexpr Tag kSpecificCharacterSet{0x0008, 0x0005};
inline constexpr Tag kImageType{0x0008, 0x0008};
inline constexpr Tag kSopClassUid{0x0008, 0x0016};
inline constexpr Tag kSopInstanceUid{0x0008, 0x0018};
inline constexpr Tag kStudyDate{0x0008, 0x0020};
inline constexpr Tag kAccessionNumber{0x0008, 0x0050};
inline constexpr Tag kQueryRetrieveLevel{0x0008, 0x0052};
inline constexpr Tag kModality{0x0008, 0x0060};
inline constexpr Tag kModalitiesInStudy{0x0008, 0x0061};
inline constexpr Tag kInstitutionName{0x0008, 0x0080};
inline constexpr Tag kPatientName{0x0010, 0x0010};
inline constexpr Tag kPatientId{0x0010, 0x0020};
inline constexpr Tag kPatientBirthDate{0x0010, 0x0030};
inline constexpr Tag kOtherPatientIds{0x0010, 0x1000};
inline constexpr Tag kStudyInstanceUid{0x0020, 0x000D};
inline constexpr Tag kSeriesInstanceUid{0x0020, 0x000E};
inline constexpr Tag kPixelData{0x7FE0, 0x0010};

inline constexpr Tag kItem{0xFFFE, 0xE000};
inline constexpr Tag kItemDelimitation{0xFFFE, 0xE00D};
inline constexpr Tag kSequenceDelimitation{0xFFFE, 0xE0DD};
}  // namespace tags

}  // namespace minipacs::dicom

template <>
struct std::hash<minipacs::dicom::Tag> {
  std::size_t operator()(const minipacs::dicom::Tag& t) const noexcept {
    return std::hash<std::uint32_t>{}(t.value());
  }
};
