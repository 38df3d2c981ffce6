// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "minipacs/dicom/dataset.hpp"
#include "minipacs/storage/uri.hpp"

namespace minipacs::storage {

using ByteBuffer = std::vector<std::uint8_t>;

/// An encoding applied to serialized bytes before they reach the backend,
/// recorded in the stored name by `suffix`.
struct ByteEncoder {
  std::string suffix;
  std::function<ByteBuffer(std::span<const std::uint8_t>)> encode;
};

struct StoreOptions {
  std::vector<ByteEncoder> encoders;
};

/// Study/Series/SOP relative path for an object, e.g. "1.2/1.2.3/1.2.3.4.dcm".
/// Throws Error(InvalidObject) when a UID is not a safe path segment.
std::string layout_path(const dicom::DicomObject& obj);

class StorageBackend {
 public:
  virtual ~StorageBackend() = default;

  virtual std::string scheme() const = 0;

  /// Serializes `obj` in its own transfer syntax, applies `options.encoders`
  /// in order and writes the result at the layout path (plus suffixes).
  /// Storing an existing SOP instance again replaces it.
  virtual StorageUri store(const dicom::DicomObject& obj, const StoreOptions& options = {});

  /// Raw stored bytes. Throws Error(NotFound).
  virtual ByteBuffer at(const StorageUri& uri) const = 0;

  virtual bool remove(const StorageUri& uri) = 0;

  /// Stored object uris under `prefix`, depth-first lexicographic.
  virtual std::vector<StorageUri> list(const StorageUri& prefix) const = 0;

 protected:
  virtual StorageUri put(const std::string& relative_path, ByteBuffer bytes) = 0;
};

}  // namespace minipacs::storage
