// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace minipacs::dicom::uids {

inline constexpr std::string_view kImplicitVrLittleEndian = "1.2.840.10008.1.2";
inline constexpr std::string_view kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";

inline constexpr std::string_view kApplicationContext = "1.2.840.10008.3.1.1.1";
inline constexpr std::string_view kVerification = "1.2.840.10008.1.1";
inline constexpr std::string_view kStudyRootFind = "1.2.840.10008.5.1.4.1.2.2.1";
inline constexpr std::string_view kStoragePrefix = "1.2.840.10008.5.1.4.1.1.";
inline constexpr std::string_view kCtImageStorage = "1.2.840.10008.5.1.4.1.1.2";
inline constexpr std::string_view kMrImageStorage = "1.2.840.10008.5.1.4.1.1.4";
inline constexpr std::string_view kSecondaryCaptureStorage = "1.2.840.10008.5.1.4.1.1.7";

inline constexpr std::string_view kImplementationClass = "2.25.190236648123510928377413598114279053017";
inline constexpr std::string_view kImplementationVersion = "MINIPACS_1";

bool is_supported_transfer_syntax(std::string_view uid) noexcept;
bool is_storage_sop_class(std::string_view uid) noexcept;

/// Syntactically valid UID: dot-separated digit components, no leading
/// zeros, at most 64 characters.
bool is_valid_uid(std::string_view uid) noexcept;

/// Fresh "2.25.<random 128-bit decimal>" UID.
std::string generate_uid();

}  // namespace minipacs::dicom::uids
