// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minipacs/dicom/dataset.hpp"
#include "minipacs/storage/uri.hpp"

namespace minipacs::index {

using FieldMap = std::map<std::string, std::vector<std::string>>;

struct IndexDocument {
  std::string uri;
  FieldMap fields;
  std::string study_uid;
  std::string series_uid;
  std::string sop_uid;
  std::optional<std::string> patient_id;

  bool operator==(const IndexDocument&) const = default;
};

/// Every top-level element except SQ, OB, OW and UN, keyed by dictionary
/// keyword or "ggggeeee" for private and unknown tags.
IndexDocument extract_fields(const dicom::DicomObject& obj, const storage::StorageUri& uri);

/// Lowercased alphanumeric runs of `value`. Bytes above 0x7F count as
/// alphanumeric so UTF-8 text stays intact.
std::vector<std::string> tokenize(std::string_view value);

std::string to_lower(std::string_view s);

}  // namespace minipacs::index
