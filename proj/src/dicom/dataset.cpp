// SPDX-License-Identifier: Apache-2.0
#include "minipacs/dicom/dataset.hpp"

#include <fmt/format.h>

#include "minipacs/dicom/dictionary.hpp"
#include "minipacs/dicom/uids.hpp"
#include "minipacs/error.hpp"

namespace minipacs::dicom {

namespace {

bool matches_class(Vr vr, const DataElement::Value& value) {
  switch (value_class(vr)) {
    case ValueClass::Text: return std::holds_alternative<Strings>(value);
    case ValueClass::Integer: return std::holds_alternative<Integers>(value);
    case ValueClass::Decimal: return std::holds_alternative<Decimals>(value);
    case ValueClass::Bytes: return std::holds_alternative<Bytes>(value);
    case ValueClass::Items: return std::holds_alternative<Items>(value);
  }
  return false;
}

std::string required_uid(const DataSet& ds, Tag tag) {
  auto v = get_value_string(ds, tag);
  return v ? *v : std::string{};
}

}  // namespace

DataElement::DataElement(Tag tag, Vr vr, Value value) : tag_(tag), vr_(vr), value_(std::move(value)) {
  if (!matches_class(vr_, value_)) {
    throw Error(Errc::InvalidObject,
                fmt::format("element {} with VR {} given a mismatched value type", tag_.str(), vr_name(vr_)));
  }
  if (auto* s = std::get_if<Strings>(&value_); s && s->size() == 1 && s->front().empty()) s->clear();
}

DataElement DataElement::text(Tag tag, Vr vr, Strings values) { return DataElement(tag, vr, std::move(values)); }

DataElement DataElement::text(Tag tag, Vr vr, std::string value) {
  return DataElement(tag, vr, Strings{std::move(value)});
}

DataElement DataElement::integers(Tag tag, Vr vr, Integers values) {
  return DataElement(tag, vr, std::move(values));
}

DataElement DataElement::decimals(Tag tag, Vr vr, Decimals values) {
  return DataElement(tag, vr, std::move(values));
}

DataElement DataElement::bytes(Tag tag, Vr vr, Bytes data) { return DataElement(tag, vr, std::move(data)); }

DataElement DataElement::sequence(Tag tag, Items items) { return DataElement(tag, Vr::SQ, std::move(items)); }

DataElement DataElement::empty(Tag tag, Vr vr) {
  switch (value_class(vr)) {
    case ValueClass::Text: return DataElement(tag, vr, Strings{});
    case ValueClass::Integer: return DataElement(tag, vr, Integers{});
    case ValueClass::Decimal: return DataElement(tag, vr, Decimals{});
    case ValueClass::Bytes: return DataElement(tag, vr, Bytes{});
    case ValueClass::Items: return DataElement(tag, vr, Items{});
  }
  return DataElement(tag, vr, Strings{});
}

bool DataElement::is_empty() const noexcept {
  return std::visit([](const auto& v) { return v.empty(); }, value_);
}

std::vector<std::string> DataElement::value_strings() const {
  std::vector<std::string> out;
  if (const auto* s = strings()) return *s;
  if (const auto* ints = integer_values()) {
    for (auto v : *ints) {
      out.push_back(vr_ == Vr::AT ? Tag::from_value(static_cast<std::uint32_t>(v)).str() : std::to_string(v));
    }
  } else if (const auto* ds = decimal_values()) {
    for (auto v : *ds) out.push_back(fmt::format("{}", v));
  }
  return out;
}

bool DataElement::operator==(const DataElement& other) const {
  return tag_ == other.tag_ && vr_ == other.vr_ && value_ == other.value_;
}

void DataSet::set(DataElement element) {
  auto tag = element.tag();
  elements_.insert_or_assign(tag, std::move(element));
}

bool DataSet::erase(Tag tag) { return elements_.erase(tag) != 0; }

const DataElement* DataSet::find(Tag tag) const {
  auto it = elements_.find(tag);
  return it == elements_.end() ? nullptr : &it->second;
}

bool DataSet::operator==(const DataSet& other) const { return elements_ == other.elements_; }

std::optional<std::string> get_value_string(const DataSet& ds, Tag tag) {
  const auto* e = ds.find(tag);
  if (e == nullptr) return std::nullopt;
  auto cls = value_class(e->vr());
  if (cls == ValueClass::Bytes || cls == ValueClass::Items) return std::nullopt;
  auto values = e->value_strings();
  if (values.empty()) return std::string{};
  return values.front();
}

std::optional<std::string> get_value_string(const DataSet& ds, std::string_view keyword) {
  auto tag = tag_for_key(keyword);
  if (!tag) return std::nullopt;
  return get_value_string(ds, *tag);
}

DicomObject::DicomObject(DataSet meta, DataSet dataset) : meta_(std::move(meta)), dataset_(std::move(dataset)) {
  meta_.erase(tags::kFileMetaGroupLength);
  for (const auto& [tag, _] : meta_) {
    if (tag.group != 0x0002) {
      throw Error(Errc::InvalidObject, fmt::format("meta group holds non-0002 element {}", tag.str()));
    }
  }
  for (const auto& [tag, _] : dataset_) {
    if (tag.group == 0x0002) {
      throw Error(Errc::InvalidObject, fmt::format("dataset holds meta element {}", tag.str()));
    }
  }
  const std::pair<const DataSet*, Tag> required[] = {
      {&meta_, tags::kMediaStorageSopInstanceUid}, {&meta_, tags::kTransferSyntaxUid},
      {&dataset_, tags::kSopInstanceUid},          {&dataset_, tags::kStudyInstanceUid},
      {&dataset_, tags::kSeriesInstanceUid},
  };
  for (const auto& [ds, tag] : required) {
    auto v = get_value_string(*ds, tag);
    if (!v || v->empty()) {
      throw Error(Errc::InvalidObject, fmt::format("missing required element {} ({})", keyword_or_hex(tag), tag.str()));
    }
  }
}

DicomObject DicomObject::from_dataset(DataSet dataset, std::string_view transfer_syntax) {
  DataSet meta;
  meta.set(DataElement::bytes(tags::kFileMetaVersion, Vr::OB, Bytes{0x00, 0x01}));
  if (auto sop_class = get_value_string(dataset, tags::kSopClassUid); sop_class && !sop_class->empty()) {
    meta.set(DataElement::text(tags::kMediaStorageSopClassUid, Vr::UI, *sop_class));
  }
  if (auto sop = get_value_string(dataset, tags::kSopInstanceUid)) {
    meta.set(DataElement::text(tags::kMediaStorageSopInstanceUid, Vr::UI, *sop));
  }
  meta.set(DataElement::text(tags::kTransferSyntaxUid, Vr::UI, std::string(transfer_syntax)));
  meta.set(DataElement::text(tags::kImplementationClassUid, Vr::UI, std::string(uids::kImplementationClass)));
  meta.set(DataElement::text(tags::kImplementationVersionName, Vr::SH, std::string(uids::kImplementationVersion)));
  return DicomObject(std::move(meta), std::move(dataset));
}

std::string DicomObject::transfer_syntax() const { return required_uid(meta_, tags::kTransferSyntaxUid); }
std::string DicomObject::sop_instance_uid() const { return required_uid(dataset_, tags::kSopInstanceUid); }
std::string DicomObject::study_instance_uid() const { return required_uid(dataset_, tags::kStudyInstanceUid); }
std::string DicomObject::series_instance_uid() const { return required_uid(dataset_, tags::kSeriesInstanceUid); }

DicomObject DicomObject::with_dataset(DataSet dataset) const { return DicomObject(meta_, std::move(dataset)); }

DicomObject DicomObject::with_transfer_syntax(std::string_view uid) const {
  DataSet meta = meta_;
  meta.set(DataElement::text(tags::kTransferSyntaxUid, Vr::UI, std::string(uid)));
  return DicomObject(std::move(meta), dataset_);
}

}  // namespace minipacs::dicom
