// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "minipacs/storage/backend.hpp"

namespace minipacs::storage {

/// Part-10 files under <root>/<StudyUID>/<SeriesUID>/<SOPInstanceUID>.dcm.
/// Reads accept any absolute file:// path, not only paths under root.
class FileBackend final : public StorageBackend {
 public:
  explicit FileBackend(std::filesystem::path root);

  std::string scheme() const override { return "file"; }
  ByteBuffer at(const StorageUri& uri) const override;
  bool remove(const StorageUri& uri) override;
  std::vector<StorageUri> list(const StorageUri& prefix) const override;

  const std::filesystem::path& root() const noexcept { return root_; }

 protected:
  StorageUri put(const std::string& relative_path, ByteBuffer bytes) override;

 private:
  std::filesystem::path root_;
};

}  // namespace minipacs::storage
