// SPDX-License-Identifier: Apache-2.0
#include "minipacs/http/dicom_json.hpp"

#include <algorithm>
#include <charconv>
#include <string>

namespace minipacs::http {

using nlohmann::json;
using dicom::Vr;

namespace {

std::string base64(const dicom::Bytes& data) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    std::uint32_t n = std::uint32_t(data[i]) << 16;
    if (i + 1 < data.size()) n |= std::uint32_t(data[i + 1]) << 8;
    if (i + 2 < data.size()) n |= data[i + 2];
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += i + 1 < data.size() ? kAlphabet[(n >> 6) & 63] : '=';
    out += i + 2 < data.size() ? kAlphabet[n & 63] : '=';
  }
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(' ') - b + 1);
}

// IS and DS travel as JSON numbers; text that does not parse stays a string.
json number_or_text(Vr vr, const std::string& raw) {
  auto s = trim(raw);
  if (s.empty()) return nullptr;
  const char* end = s.data() + s.size();
  if (vr == Vr::IS) {
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec == std::errc() && p == end) return v;
  } else {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec == std::errc() && p == end) return v;
  }
  return raw;
}

json element_json(const dicom::DataElement& el) {
  json out = {{"vr", std::string(dicom::vr_name(el.vr()))}};
  if (el.is_empty()) return out;
  if (const auto* strings = el.strings();
      strings && std::all_of(strings->begin(), strings->end(), [](const std::string& s) { return s.empty(); }))
    return out;
  const auto vr = el.vr();
  json values = json::array();
  if (const auto* items = el.items()) {
    for (const auto& item : *items) values.push_back(to_dicom_json(item));
  } else if (const auto* bytes = el.byte_values()) {
    out["InlineBinary"] = base64(*bytes);
    return out;
  } else if (const auto* ints = el.integer_values()) {
    for (auto v : *ints) {
      if (vr == Vr::AT) values.push_back(dicom::Tag::from_value(static_cast<std::uint32_t>(v)).str());
      else values.push_back(v);
    }
  } else if (const auto* ds = el.decimal_values()) {
    for (auto v : *ds) values.push_back(v);
  } else if (const auto* strings = el.strings()) {
    for (const auto& s : *strings) {
      if (vr == Vr::PN) values.push_back(s.empty() ? json(nullptr) : json{{"Alphabetic", s}});
      else if (vr == Vr::IS || vr == Vr::DS) values.push_back(number_or_text(vr, s));
      else values.push_back(s.empty() ? json(nullptr) : json(s));
    }
  }
  out["Value"] = std::move(values);
  return out;
}

}  // namespace

json to_dicom_json(const dicom::DataSet& ds) {
  json out = json::object();
  for (const auto& [tag, el] : ds) out[tag.str()] = element_json(el);
  return out;
}

}  // namespace minipacs::http
