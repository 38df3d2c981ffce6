// SPDX-License-Identifier: Apache-2.0
// Translation of DICOM query identifiers to index queries, shared by C-FIND
// and QIDO-RS.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "minipacs/dicom/dataset.hpp"
#include "minipacs/index/query.hpp"
#include "minipacs/plugin/plugin.hpp"

namespace minipacs::net {

enum class QueryLevel { Patient, Study, Series, Image };

std::optional<QueryLevel> parse_level(std::string_view text);
std::string_view level_name(QueryLevel level);
/// PatientID, StudyInstanceUID, SeriesInstanceUID or SOPInstanceUID.
dicom::Tag level_key(QueryLevel level);

/// Conjunction of one term per non-empty attribute, DICOM wildcards passed
/// through. QueryRetrieveLevel, SpecificCharacterSet, sequences and binary
/// elements are ignored; an identifier without matching keys is MatchAll.
index::QueryNode identifier_query(const dicom::DataSet& identifier);

using QueryRunner = std::function<plugin::ResultSet(const std::string& query, const plugin::QueryOptions& options)>;

/// Runs the identifier's query and folds hits into one response identifier
/// per distinct level key, in hit order. Each response carries every
/// attribute of the request (values from the first hit of the group), the
/// QueryRetrieveLevel, and for studies the computed ModalitiesInStudy.
std::vector<dicom::DataSet> find_matches(const dicom::DataSet& identifier, QueryLevel level, const QueryRunner& run);

}  // namespace minipacs::net
