// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "minipacs/dicom/tag.hpp"
#include "minipacs/dicom/vr.hpp"

namespace minipacs::dicom {

class DataSet;

using Strings = std::vector<std::string>;
using Integers = std::vector<std::int64_t>;  // US UL SS SL, and AT as group<<16|element
using Decimals = std::vector<double>;        // FL FD
using Bytes = std::vector<std::uint8_t>;     // OB OW UN
using Items = std::vector<DataSet>;          // SQ

class DataElement {
 public:
  using Value = std::variant<Strings, Integers, Decimals, Bytes, Items>;

  /// Throws Error(InvalidObject) when the value alternative does not match
  /// the VR's value class. A text list holding one empty string is stored
  /// as an empty list, matching what a zero-length element decodes to.
  DataElement(Tag tag, Vr vr, Value value);

  static DataElement text(Tag tag, Vr vr, Strings values);
  static DataElement text(Tag tag, Vr vr, std::string value);
  static DataElement integers(Tag tag, Vr vr, Integers values);
  static DataElement decimals(Tag tag, Vr vr, Decimals values);
  static DataElement bytes(Tag tag, Vr vr, Bytes data);
  static DataElement sequence(Tag tag, Items items);

  /// Empty value of the right class for `vr`.
  static DataElement empty(Tag tag, Vr vr);

  Tag tag() const noexcept { return tag_; }
  Vr vr() const noexcept { return vr_; }
  const Value& value() const noexcept { return value_; }

  const Strings* strings() const noexcept { return std::get_if<Strings>(&value_); }
  const Integers* integer_values() const noexcept { return std::get_if<Integers>(&value_); }
  const Decimals* decimal_values() const noexcept { return std::get_if<Decimals>(&value_); }
  const Bytes* byte_values() const noexcept { return std::get_if<Bytes>(&value_); }
  const Items* items() const noexcept { return std::get_if<Items>(&value_); }

  bool is_empty() const noexcept;

  /// Every value rendered as text (numbers in decimal, AT as 8 hex digits).
  /// Empty for SQ, OB, OW and UN.
  std::vector<std::string> value_strings() const;

  bool operator==(const DataElement& other) const;

 private:
  Tag tag_;
  Vr vr_;
  Value value_;
};

/// Ordered tag -> element map; iteration is ascending by tag.
class DataSet {
 public:
  using Map = std::map<Tag, DataElement>;
  using const_iterator = Map::const_iterator;

  DataSet() = default;

  void set(DataElement element);
  bool erase(Tag tag);
  const DataElement* find(Tag tag) const;
  bool contains(Tag tag) const { return elements_.count(tag) != 0; }

  const_iterator begin() const { return elements_.begin(); }
  const_iterator end() const { return elements_.end(); }
  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }

  bool operator==(const DataSet& other) const;

 private:
  Map elements_;
};

/// First value of the element as text, or nullopt when the element is
/// missing or carries no textual rendering (SQ, OB, OW, UN). A present
/// element with no values yields "".
std::optional<std::string> get_value_string(const DataSet& ds, Tag tag);
std::optional<std::string> get_value_string(const DataSet& ds, std::string_view keyword);

/// A Part-10 object: file meta group plus dataset.
class DicomObject {
 public:
  /// Throws Error(InvalidObject) unless meta holds only group 0002 with
  /// MediaStorageSOPInstanceUID and TransferSyntaxUID, and the dataset holds
  /// no group 0002 and carries the SOP/Study/Series instance UIDs. The meta
  /// group length element is dropped; the writer recomputes it.
  DicomObject(DataSet meta, DataSet dataset);

  /// Synthesizes the meta group for `dataset` in `transfer_syntax`.
  static DicomObject from_dataset(DataSet dataset, std::string_view transfer_syntax);

  const DataSet& meta() const noexcept { return meta_; }
  const DataSet& dataset() const noexcept { return dataset_; }
  std::string transfer_syntax() const;

  std::string sop_instance_uid() const;
  std::string study_instance_uid() const;
  std::string series_instance_uid() const;

  /// Copy with the dataset replaced; meta is kept.
  DicomObject with_dataset(DataSet dataset) const;
  /// Copy with TransferSyntaxUID replaced.
  DicomObject with_transfer_syntax(std::string_view uid) const;

  bool operator==(const DicomObject& other) const = default;

 private:
  DataSet meta_;
  DataSet dataset_;
};

}  // namespace minipacs::dicom
