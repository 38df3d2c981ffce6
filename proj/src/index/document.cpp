// SPDX-License-Identifier: Apache-2.0
#include "minipacs/index/document.hpp"

#include "minipacs/dicom/dictionary.hpp"

namespace minipacs::index {

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view value) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : value) {
    auto c = static_cast<unsigned char>(ch);
    bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
    if (alnum) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

IndexDocument extract_fields(const dicom::DicomObject& obj, const storage::StorageUri& uri) {
  using dicom::Vr;
  IndexDocument doc;
  doc.uri = uri.str();
  for (const auto& [tag, el] : obj.dataset()) {
    auto vr = el.vr();
    if (vr == Vr::SQ || vr == Vr::OB || vr == Vr::OW || vr == Vr::UN) continue;
    doc.fields[dicom::keyword_or_hex(tag)] = el.value_strings();
  }
  doc.study_uid = obj.study_instance_uid();
  doc.series_uid = obj.series_instance_uid();
  doc.sop_uid = obj.sop_instance_uid();
  if (auto it = doc.fields.find("PatientID"); it != doc.fields.end() && !it->second.empty())
    doc.patient_id = it->second.front();
  return doc;
}

}  // namespace minipacs::index
