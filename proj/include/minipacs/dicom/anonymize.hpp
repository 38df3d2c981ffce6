// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "minipacs/dicom/dataset.hpp"

namespace minipacs::dicom {

/// PatientName, PatientID, PatientBirthDate, OtherPatientIDs, InstitutionName.
const std::vector<Tag>& default_anonymization_profile();

/// Copy of `ds` with each listed element kept but its value emptied.
DataSet anonymize(const DataSet& ds, std::span<const Tag> profile);

}  // namespace minipacs::dicom
