// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace minipacs {

enum class Errc {
  // dicom codec
  MissingMagic,
  UnsupportedTransferSyntax,
  Truncated,
  BadLength,
  BadVr,
  UnencodableValue,
  InvalidObject,
  // configuration and plugins
  Malformed,
  DuplicateName,
  UnknownPlugin,
  // storage
  NoStorage,
  BadUri,
  NotFound,
  IoFailure,
  Corrupt,
  // query language
  SyntaxError,
  // upper layer protocol
  BadPduType,
  Oversize,
  ProtocolError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above, so
/// callers (CLI exit codes, HTTP statuses, DIMSE statuses) can map on it.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Query parse failure; position is a byte offset into the query text.
class QuerySyntaxError : public Error {
 public:
  QuerySyntaxError(std::size_t position, const std::string& message);

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace minipacs
