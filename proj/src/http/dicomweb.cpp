// SPDX-License-Identifier: Apache-2.0
#include "minipacs/http/dicomweb.hpp"

#include <charconv>
#include <regex>

#include <fmt/format.h>

#include <json.hpp>

#include "minipacs/dicom/dictionary.hpp"
#include "minipacs/error.hpp"
#include "minipacs/http/dicom_json.hpp"
#include "minipacs/index/query.hpp"
#include "minipacs/net/find.hpp"

namespace minipacs::http {

using plugin::WebRequest;
using plugin::WebResponse;
namespace tags = dicom::tags;

namespace {

WebResponse json_error(int status, const std::string& message) {
  return {status, "application/json", nlohmann::json{{"error", message}}.dump()};
}

const dicom::Tag kDefaultStudyKeys[] = {tags::kStudyInstanceUid, tags::kPatientName, tags::kPatientId,
                                        tags::kStudyDate, tags::kModalitiesInStudy, tags::kAccessionNumber};

bool valid_uid(const std::string& uid) {
  static const std::regex re("[0-9]+(\\.[0-9]+)*");
  return !uid.empty() && uid.size() <= 64 && std::regex_match(uid, re);
}

}  // namespace

std::vector<plugin::WebRoute> DicomWebPlugin::routes() {
  return {
      {"GET", "/dicomweb/studies", [this](const WebRequest& r) { return search_studies(r); }},
      {"GET", "/dicomweb/studies/([^/]+)/series/([^/]+)/instances/([^/]+)",
       [this](const WebRequest& r) { return retrieve_instance(r); }},
  };
}

WebResponse DicomWebPlugin::search_studies(const WebRequest& req) const {
  dicom::DataSet identifier;
  for (auto tag : kDefaultStudyKeys) {
    auto entry = dicom::dict_lookup(tag);
    identifier.set(dicom::DataElement::empty(tag, entry ? entry->vr : dicom::Vr::LO));
  }
  std::size_t limit = 0;
  for (const auto& [key, value] : req.params) {
    if (key == "limit") {
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), limit);
      if (ec != std::errc() || p != value.data() + value.size()) return json_error(400, "limit must be a non-negative integer");
      continue;
    }
    auto tag = dicom::tag_for_key(key);
    auto entry = tag ? dicom::dict_lookup(*tag) : std::nullopt;
    if (!tag || !entry) return json_error(400, fmt::format("unknown attribute \"{}\"", key));
    if (dicom::value_class(entry->vr) != dicom::ValueClass::Text)
      return json_error(400, fmt::format("attribute \"{}\" cannot be matched", key));
    if (value.empty()) identifier.set(dicom::DataElement::empty(*tag, entry->vr));
    else identifier.set(dicom::DataElement::text(*tag, entry->vr, value));
  }
  identifier.set(dicom::DataElement::text(tags::kQueryRetrieveLevel, dicom::Vr::CS, "STUDY"));

  std::vector<dicom::DataSet> matches;
  try {
    matches = net::find_matches(identifier, net::QueryLevel::Study,
                                [this](const std::string& q, const plugin::QueryOptions& o) { return dispatcher_.query(q, o); });
  } catch (const Error& e) {
    return json_error(e.code() == Errc::UnknownPlugin ? 503 : 500, e.what());
  }
  auto out = nlohmann::json::array();
  for (auto& m : matches) {
    if (limit != 0 && out.size() >= limit) break;
    m.erase(tags::kQueryRetrieveLevel);
    out.push_back(to_dicom_json(m));
  }
  return {200, "application/dicom+json", out.dump()};
}

WebResponse DicomWebPlugin::retrieve_instance(const WebRequest& req) const {
  if (req.captures.size() != 3) return json_error(400, "expected study, series and instance uids");
  for (const auto& uid : req.captures) {
    if (!valid_uid(uid)) return json_error(400, fmt::format("\"{}\" is not a UID", uid));
  }
  auto q = index::QueryNode::conj({index::QueryNode::term("StudyInstanceUID", req.captures[0]),
                                   index::QueryNode::term("SeriesInstanceUID", req.captures[1]),
                                   index::QueryNode::term("SOPInstanceUID", req.captures[2])});
  plugin::QueryOptions options;
  options.max_hits = 1;
  options.fields_filter = {"SOPInstanceUID"};
  try {
    auto rs = dispatcher_.query(index::to_string(q), options);
    if (rs.hits.empty()) return json_error(404, "no such instance");
    auto uri = storage::StorageUri::parse(rs.hits.front().uri);
    auto bytes = dispatcher_.resolve(uri)->at(uri);
    return {200, "application/dicom", std::string(bytes.begin(), bytes.end())};
  } catch (const Error& e) {
    if (e.code() == Errc::NotFound || e.code() == Errc::NoStorage) return json_error(404, e.what());
    if (e.code() == Errc::UnknownPlugin) return json_error(503, e.what());
    return json_error(500, e.what());
  }
}

}  // namespace minipacs::http
