// SPDX-License-Identifier: Apache-2.0
#include "minipacs/error.hpp"

namespace minipacs {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MissingMagic: return "MissingMagic";
    case Errc::UnsupportedTransferSyntax: return "UnsupportedTransferSyntax";
    case Errc::Truncated: return "Truncated";
    case Errc::BadLength: return "BadLength";
    case Errc::BadVr: return "BadVr";
    case Errc::UnencodableValue: return "UnencodableValue";
    case Errc::InvalidObject: return "InvalidObject";
    case Errc::Malformed: return "Malformed";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::UnknownPlugin: return "UnknownPlugin";
    case Errc::NoStorage: return "NoStorage";
    case Errc::BadUri: return "BadUri";
    case Errc::NotFound: return "NotFound";
    case Errc::IoFailure: return "IoFailure";
    case Errc::Corrupt: return "Corrupt";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::BadPduType: return "BadPduType";
    case Errc::Oversize: return "Oversize";
    case Errc::ProtocolError: return "ProtocolError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

QuerySyntaxError::QuerySyntaxError(std::size_t position, const std::string& message)
    : Error(Errc::SyntaxError, "at position " + std::to_string(position) + ": " + message),
      position_(position) {}

}  // namespace minipacs
