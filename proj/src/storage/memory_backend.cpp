// SPDX-License-Identifier: Apache-2.0
#include "minipacs/storage/memory_backend.hpp"

#include <algorithm>
#include <mutex>

#include "minipacs/error.hpp"

namespace minipacs::storage {

namespace {

const std::string& mem_path(const StorageUri& uri) {
  if (uri.scheme != "mem") throw Error(Errc::NoStorage, "memory backend cannot serve '" + uri.str() + "'");
  return uri.path;
}

bool under(const std::string& key, const std::string& prefix) {
  if (prefix.empty() || key == prefix) return true;
  auto p = prefix.back() == '/' ? prefix : prefix + "/";
  return key.compare(0, p.size(), p) == 0;
}

}  // namespace

StorageUri MemoryBackend::put(const std::string& relative_path, ByteBuffer bytes) {
  std::unique_lock lock(mutex_);
  objects_.insert_or_assign(relative_path, std::move(bytes));
  return StorageUri{"mem", relative_path};
}

ByteBuffer MemoryBackend::at(const StorageUri& uri) const {
  const auto& key = mem_path(uri);
  std::shared_lock lock(mutex_);
  auto it = objects_.find(key);
  if (it == objects_.end()) throw Error(Errc::NotFound, "no stored object at " + uri.str());
  return it->second;
}

bool MemoryBackend::remove(const StorageUri& uri) {
  const auto& key = mem_path(uri);
  std::unique_lock lock(mutex_);
  return objects_.erase(key) != 0;
}

std::vector<StorageUri> MemoryBackend::list(const StorageUri& prefix) const {
  const auto& p = mem_path(prefix);
  std::vector<StorageUri> out;
  {
    std::shared_lock lock(mutex_);
    for (const auto& [key, _] : objects_) {
      if (under(key, p)) out.push_back(StorageUri{"mem", key});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return path_order_less(a.path, b.path); });
  return out;
}

}  // namespace minipacs::storage
