// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace minipacs::dicom {

enum class Vr : std::uint8_t {
  AE, AS, AT, CS, DA, DS, DT, FL, FD, IS, LO, LT, OB,
  OW, PN, SH, SL, SQ, SS, ST, TM, UI, UL, UN, US, UT,
};

inline constexpr std::array kAllVrs = {
    Vr::AE, Vr::AS, Vr::AT, Vr::CS, Vr::DA, Vr::DS, Vr::DT, Vr::FL, Vr::FD,
    Vr::IS, Vr::LO, Vr::LT, Vr::OB, Vr::OW, Vr::PN, Vr::SH, Vr::SL, Vr::SQ,
    Vr::SS, Vr::ST, Vr::TM, Vr::UI, Vr::UL, Vr::UN, Vr::US, Vr::UT,
};

/// Which alternative of DataElement::Value a VR carries.
enum class ValueClass { Text, Integer, Decimal, Bytes, Items };

std::string_view vr_name(Vr vr) noexcept;
std::optional<Vr> parse_vr(std::string_view code) noexcept;

ValueClass value_class(Vr vr) noexcept;

/// Explicit VR encoding uses 2 reserved bytes plus a 4-byte length for these.
constexpr bool has_long_length(Vr vr) noexcept {
  return vr == Vr::OB || vr == Vr::OW || vr == Vr::SQ || vr == Vr::UN || vr == Vr::UT;
}

/// Text VRs whose value may hold several backslash-separated values.
constexpr bool is_multi_valued_text(Vr vr) noexcept {
  return vr != Vr::LT && vr != Vr::ST && vr != Vr::UT;
}

/// Byte width of one binary value for Integer/Decimal VRs, 0 otherwise.
std::size_t binary_width(Vr vr) noexcept;

}  // namespace minipacs::dicom
