// SPDX-License-Identifier: Apache-2.0
#include "minipacs/dicom/vr.hpp"

namespace minipacs::dicom {

namespace {
constexpr std::array<std::string_view, kAllVrs.size()> kNames = {
    "AE", "AS", "AT", "CS", "DA", "DS", "DT", "FL", "FD", "IS", "LO", "LT", "OB",
    "OW", "PN", "SH", "SL", "SQ", "SS", "ST", "TM", "UI", "UL", "UN", "US", "UT",
};
}  // namespace

std::string_view vr_name(Vr vr) noexcept { return kNames[static_cast<std::size_t>(vr)]; }

std::optional<Vr> parse_vr(std::string_view code) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == code) return kAllVrs[i];
  }
  return std::nullopt;
}

ValueClass value_class(Vr vr) noexcept {
  switch (vr) {
    case Vr::AT:
    case Vr::SL:
    case Vr::SS:
    case Vr::UL:
    case Vr::US:
      return ValueClass::Integer;
    case Vr::FL:
    case Vr::FD:
      return ValueClass::Decimal;
    case Vr::OB:
    case Vr::OW:
    case Vr::UN:
      return ValueClass::Bytes;
    case Vr::SQ:
      return ValueClass::Items;
    default:
      return ValueClass::Text;
  }
}

std::size_t binary_width(Vr vr) noexcept {
  switch (vr) {
    case Vr::US:
    case Vr::SS:
      return 2;
    case Vr::UL:
    case Vr::SL:
    case Vr::AT:
    case Vr::FL:
      return 4;
    case Vr::FD:
      return 8;
    default:
      return 0;
  }
}

}  // namespace minipacs::dicom
