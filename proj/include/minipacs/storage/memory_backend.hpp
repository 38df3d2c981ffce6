// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <shared_mutex>

#include "minipacs/storage/backend.hpp"

namespace minipacs::storage {

/// Process-lifetime store behind the mem:// scheme.
class MemoryBackend final : public StorageBackend {
 public:
  std::string scheme() const override { return "mem"; }
  ByteBuffer at(const StorageUri& uri) const override;
  bool remove(const StorageUri& uri) override;
  std::vector<StorageUri> list(const StorageUri& prefix) const override;

 protected:
  StorageUri put(const std::string& relative_path, ByteBuffer bytes) override;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, ByteBuffer> objects_;
};

}  // namespace minipacs::storage
