// SPDX-License-Identifier: Apache-2.0
#include "minipacs/net/find.hpp"

#include <map>
#include <set>

#include "minipacs/dicom/dictionary.hpp"

namespace minipacs::net {

using dicom::DataElement;
using dicom::DataSet;
using dicom::Tag;
using dicom::Vr;
namespace tags = dicom::tags;

std::optional<QueryLevel> parse_level(std::string_view text) {
  if (text == "PATIENT") return QueryLevel::Patient;
  if (text == "STUDY") return QueryLevel::Study;
  if (text == "SERIES") return QueryLevel::Series;
  if (text == "IMAGE") return QueryLevel::Image;
  return std::nullopt;
}

std::string_view level_name(QueryLevel level) {
  switch (level) {
    case QueryLevel::Patient: return "PATIENT";
    case QueryLevel::Study: return "STUDY";
    case QueryLevel::Series: return "SERIES";
    case QueryLevel::Image: return "IMAGE";
  }
  return "STUDY";
}

Tag level_key(QueryLevel level) {
  switch (level) {
    case QueryLevel::Patient: return tags::kPatientId;
    case QueryLevel::Study: return tags::kStudyInstanceUid;
    case QueryLevel::Series: return tags::kSeriesInstanceUid;
    case QueryLevel::Image: return tags::kSopInstanceUid;
  }
  return tags::kStudyInstanceUid;
}

namespace {

bool skipped(const DataElement& el) {
  auto tag = el.tag();
  if (tag == tags::kQueryRetrieveLevel || tag == tags::kSpecificCharacterSet || tag == tags::kModalitiesInStudy) return true;
  auto vc = dicom::value_class(el.vr());
  return vc == dicom::ValueClass::Items || vc == dicom::ValueClass::Bytes;
}

/// Rebuilds an element of the request's VR from indexed text values.
std::optional<DataElement> element_from_text(Tag tag, Vr vr, const std::vector<std::string>& values) {
  try {
    switch (dicom::value_class(vr)) {
      case dicom::ValueClass::Text: return DataElement::text(tag, vr, values);
      case dicom::ValueClass::Integer: {
        dicom::Integers ints;
        for (auto& v : values) ints.push_back(vr == Vr::AT ? Tag::parse(v).value_or(Tag{}).value() : std::stoll(v));
        return DataElement::integers(tag, vr, std::move(ints));
      }
      case dicom::ValueClass::Decimal: {
        dicom::Decimals ds;
        for (auto& v : values) ds.push_back(std::stod(v));
        return DataElement::decimals(tag, vr, std::move(ds));
      }
      default: return std::nullopt;
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

index::QueryNode identifier_query(const DataSet& identifier) {
  std::vector<index::QueryNode> terms;
  for (const auto& [tag, el] : identifier) {
    if (skipped(el) || el.is_empty()) continue;
    auto values = el.value_strings();
    if (values.empty() || values.front().empty()) continue;
    terms.push_back(index::QueryNode::term(dicom::keyword_or_hex(tag), values.front()));
  }
  if (terms.empty()) return index::QueryNode::match_all();
  return index::QueryNode::conj(std::move(terms));
}

std::vector<DataSet> find_matches(const DataSet& identifier, QueryLevel level, const QueryRunner& run) {
  const auto key_tag = level_key(level);
  const auto key_name = dicom::keyword_or_hex(key_tag);
  const bool want_modalities = level == QueryLevel::Study && identifier.contains(tags::kModalitiesInStudy);

  plugin::QueryOptions options;
  options.fields_filter.push_back(key_name);
  for (const auto& [tag, _] : identifier) options.fields_filter.push_back(dicom::keyword_or_hex(tag));
  if (want_modalities) options.fields_filter.push_back("Modality");

  auto rs = run(index::to_string(identifier_query(identifier)), options);

  std::vector<std::string> order;
  std::map<std::string, const plugin::SearchHit*> first_hit;
  std::map<std::string, std::set<std::string>> modalities;
  for (const auto& hit : rs.hits) {
    auto it = hit.fields.find(key_name);
    if (it == hit.fields.end() || it->second.empty() || it->second.front().empty()) continue;
    const auto& key = it->second.front();
    if (first_hit.emplace(key, &hit).second) order.push_back(key);
    if (want_modalities) {
      if (auto m = hit.fields.find("Modality"); m != hit.fields.end()) modalities[key].insert(m->second.begin(), m->second.end());
    }
  }

  std::vector<DataSet> out;
  for (const auto& key : order) {
    const auto& hit = *first_hit.at(key);
    DataSet ds;
    for (const auto& [tag, el] : identifier) {
      if (tag == tags::kQueryRetrieveLevel || tag == tags::kModalitiesInStudy) continue;
      if (dicom::value_class(el.vr()) == dicom::ValueClass::Items || dicom::value_class(el.vr()) == dicom::ValueClass::Bytes) {
        ds.set(DataElement::empty(tag, el.vr()));
        continue;
      }
      auto f = hit.fields.find(dicom::keyword_or_hex(tag));
      std::optional<DataElement> filled;
      if (f != hit.fields.end()) filled = element_from_text(tag, el.vr(), f->second);
      ds.set(filled ? std::move(*filled) : DataElement::empty(tag, el.vr()));
    }
    ds.set(DataElement::text(key_tag, key_tag == tags::kPatientId ? Vr::LO : Vr::UI, key));
    ds.set(DataElement::text(tags::kQueryRetrieveLevel, Vr::CS, std::string(level_name(level))));
    if (want_modalities) {
      auto& mods = modalities[key];
      ds.set(DataElement::text(tags::kModalitiesInStudy, Vr::CS, dicom::Strings(mods.begin(), mods.end())));
    }
    out.push_back(std::move(ds));
  }
  return out;
}

}  // namespace minipacs::net
