// SPDX-License-Identifier: Apache-2.0
#include "minipacs/storage/backend.hpp"

#include <algorithm>

#include "minipacs/dicom/codec.hpp"
#include "minipacs/error.hpp"

namespace minipacs::storage {

namespace {

std::string safe_segment(const std::string& uid, std::string_view what) {
  const bool ok = !uid.empty() && uid.size() <= 64 && uid.front() != '.' &&
                  uid.find("..") == std::string::npos &&
                  std::all_of(uid.begin(), uid.end(), [](char c) { return (c >= '0' && c <= '9') || c == '.'; });
  if (!ok) throw Error(Errc::InvalidObject, std::string(what) + " '" + uid + "' is not usable as a path segment");
  return uid;
}

}  // namespace

std::string layout_path(const dicom::DicomObject& obj) {
  return safe_segment(obj.study_instance_uid(), "StudyInstanceUID") + "/" +
         safe_segment(obj.series_instance_uid(), "SeriesInstanceUID") + "/" +
         safe_segment(obj.sop_instance_uid(), "SOPInstanceUID") + ".dcm";
}

StorageUri StorageBackend::store(const dicom::DicomObject& obj, const StoreOptions& options) {
  auto path = layout_path(obj);
  auto bytes = dicom::serialize_object(obj, obj.transfer_syntax());
  for (const auto& encoder : options.encoders) {
    bytes = encoder.encode(bytes);
    path += encoder.suffix;
  }
  return put(path, std::move(bytes));
}

}  // namespace minipacs::storage
