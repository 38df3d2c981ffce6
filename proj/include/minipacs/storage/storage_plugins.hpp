// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "minipacs/plugin/plugin.hpp"
#include "minipacs/storage/file_backend.hpp"
#include "minipacs/storage/memory_backend.hpp"

namespace minipacs::storage {

class FileStoragePlugin final : public plugin::StoragePlugin {
 public:
  explicit FileStoragePlugin(std::filesystem::path root) : backend_(std::make_shared<FileBackend>(std::move(root))) {}
  std::string name() const override { return "file-storage"; }
  std::string scheme() const override { return "file"; }
  std::shared_ptr<StorageBackend> backend() override { return backend_; }

 private:
  std::shared_ptr<FileBackend> backend_;
};

class MemoryStoragePlugin final : public plugin::StoragePlugin {
 public:
  std::string name() const override { return "mem-storage"; }
  std::string scheme() const override { return "mem"; }
  std::shared_ptr<StorageBackend> backend() override { return backend_; }

 private:
  std::shared_ptr<MemoryBackend> backend_ = std::make_shared<MemoryBackend>();
};

/// Disabled unless the configuration enables it.
class GzipStoragePlugin final : public plugin::StoragePlugin {
 public:
  std::string name() const override { return "gzip-storage"; }
  bool enabled_by_default() const override { return false; }
  bool is_transform() const override { return true; }
  std::shared_ptr<StorageBackend> wrap(std::shared_ptr<StorageBackend> inner) override;
};

/// Disabled unless the configuration enables it. Setting "tags" takes a
/// comma-separated list of keywords or hex tags replacing the default
/// profile.
class AnonymizeStoragePlugin final : public plugin::StoragePlugin {
 public:
  AnonymizeStoragePlugin();
  std::string name() const override { return "anonymize-storage"; }
  bool enabled_by_default() const override { return false; }
  bool is_transform() const override { return true; }
  void configure(const plugin::Parameters& settings) override;
  std::shared_ptr<StorageBackend> wrap(std::shared_ptr<StorageBackend> inner) override;

 private:
  std::vector<dicom::Tag> profile_;
};

/// Set "storage": file, mem, gzip and anonymize plugins.
class StoragePluginSet final : public plugin::PluginSet {
 public:
  explicit StoragePluginSet(std::filesystem::path file_root);
  std::string name() const override { return "storage"; }
  std::vector<std::shared_ptr<plugin::Plugin>> plugins() const override { return plugins_; }

 private:
  std::vector<std::shared_ptr<plugin::Plugin>> plugins_;
};

}  // namespace minipacs::storage
