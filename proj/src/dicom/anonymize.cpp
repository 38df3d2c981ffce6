// SPDX-License-Identifier: Apache-2.0
#include "minipacs/dicom/anonymize.hpp"

namespace minipacs::dicom {

const std::vector<Tag>& default_anonymization_profile() {
  static const std::vector<Tag> profile = {
      tags::kPatientName, tags::kPatientId, tags::kPatientBirthDate, tags::kOtherPatientIds, tags::kInstitutionName,
  };
  return profile;
}

DataSet anonymize(const DataSet& ds, std::span<const Tag> profile) {
  DataSet out = ds;
  for (auto tag : profile) {
    if (const auto* e = ds.find(tag)) out.set(DataElement::empty(tag, e->vr()));
  }
  return out;
}

}  // namespace minipacs::dicom
