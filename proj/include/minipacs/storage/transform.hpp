// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "minipacs/dicom/tag.hpp"
#include "minipacs/storage/backend.hpp"

namespace minipacs::storage {

/// Base for wrappers that delegate to an inner backend and expose its scheme.
class ForwardingBackend : public StorageBackend {
 public:
  explicit ForwardingBackend(std::shared_ptr<StorageBackend> inner) : inner_(std::move(inner)) {}

  std::string scheme() const override { return inner_->scheme(); }
  StorageUri store(const dicom::DicomObject& obj, const StoreOptions& options) override;
  ByteBuffer at(const StorageUri& uri) const override { return inner_->at(uri); }
  bool remove(const StorageUri& uri) override { return inner_->remove(uri); }
  std::vector<StorageUri> list(const StorageUri& prefix) const override { return inner_->list(prefix); }

 protected:
  StorageUri put(const std::string& relative_path, ByteBuffer bytes) override;
  const std::shared_ptr<StorageBackend>& inner() const noexcept { return inner_; }

 private:
  std::shared_ptr<StorageBackend> inner_;
};

/// Gzip-compresses on store (".gz" suffix) and inflates on read, so at()
/// always yields Part-10 bytes. Inflate failures raise Error(Corrupt).
class CompressingBackend final : public ForwardingBackend {
 public:
  using ForwardingBackend::ForwardingBackend;

  StorageUri store(const dicom::DicomObject& obj, const StoreOptions& options) override;
  ByteBuffer at(const StorageUri& uri) const override;
};

/// Blanks the profile elements before delegating. Irreversible.
class AnonymizingBackend final : public ForwardingBackend {
 public:
  AnonymizingBackend(std::shared_ptr<StorageBackend> inner, std::vector<dicom::Tag> profile);

  StorageUri store(const dicom::DicomObject& obj, const StoreOptions& options) override;

 private:
  std::vector<dicom::Tag> profile_;
};

}  // namespace minipacs::storage
