// SPDX-License-Identifier: Apache-2.0
#include "minipacs/storage/transform.hpp"

#include "minipacs/dicom/anonymize.hpp"
#include "minipacs/error.hpp"
#include "minipacs/storage/gzip.hpp"

namespace minipacs::storage {

namespace {
constexpr std::string_view kGzipSuffix = ".gz";
}

StorageUri ForwardingBackend::store(const dicom::DicomObject& obj, const StoreOptions& options) {
  return inner_->store(obj, options);
}

StorageUri ForwardingBackend::put(const std::string& relative_path, ByteBuffer) {
  // store() is always forwarded, so the raw write path is never reached.
  throw Error(Errc::IoFailure, "wrapper cannot write '" + relative_path + "' directly");
}

StorageUri CompressingBackend::store(const dicom::DicomObject& obj, const StoreOptions& options) {
  StoreOptions with_gzip = options;
  with_gzip.encoders.push_back(ByteEncoder{std::string(kGzipSuffix), [](std::span<const std::uint8_t> data) {
                                             return gzip_compress(data);
                                           }});
  return inner()->store(obj, with_gzip);
}

ByteBuffer CompressingBackend::at(const StorageUri& uri) const {
  auto bytes = inner()->at(uri);
  if (!uri.has_suffix(kGzipSuffix)) return bytes;
  return gzip_decompress(bytes);
}

AnonymizingBackend::AnonymizingBackend(std::shared_ptr<StorageBackend> inner, std::vector<dicom::Tag> profile)
    : ForwardingBackend(std::move(inner)), profile_(std::move(profile)) {}

StorageUri AnonymizingBackend::store(const dicom::DicomObject& obj, const StoreOptions& options) {
  return inner()->store(obj.with_dataset(dicom::anonymize(obj.dataset(), profile_)), options);
}

}  // namespace minipacs::storage
