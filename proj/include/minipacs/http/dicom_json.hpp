// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "minipacs/dicom/dataset.hpp"

namespace minipacs::http {

/// DICOM JSON model: {"GGGGEEEE": {"vr": ..., "Value": [...]}}. PN values
/// become {"Alphabetic": ...}, IS/DS numbers, binary values InlineBinary.
/// Elements without values have no "Value" member.
nlohmann::json to_dicom_json(const dicom::DataSet& ds);

}  // namespace minipacs::http
