// SPDX-License-Identifier: Apache-2.0
#include "minipacs/storage/storage_plugins.hpp"

#include <fmt/format.h>

#include "minipacs/dicom/anonymize.hpp"
#include "minipacs/dicom/dictionary.hpp"
#include "minipacs/error.hpp"
#include "minipacs/storage/transform.hpp"

namespace minipacs::storage {

std::shared_ptr<StorageBackend> GzipStoragePlugin::wrap(std::shared_ptr<StorageBackend> inner) {
  return std::make_shared<CompressingBackend>(std::move(inner));
}

AnonymizeStoragePlugin::AnonymizeStoragePlugin() : profile_(dicom::default_anonymization_profile()) {}

void AnonymizeStoragePlugin::configure(const plugin::Parameters& settings) {
  auto it = settings.find("tags");
  if (it == settings.end()) return;
  std::vector<dicom::Tag> tags;
  std::string_view rest = it->second;
  while (!rest.empty()) {
    auto comma = rest.find(',');
    auto item = rest.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      auto tag = dicom::tag_for_key(item);
      if (!tag) throw Error(Errc::Malformed, fmt::format("anonymize-storage: unknown tag \"{}\"", item));
      tags.push_back(*tag);
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  profile_ = std::move(tags);
}

std::shared_ptr<StorageBackend> AnonymizeStoragePlugin::wrap(std::shared_ptr<StorageBackend> inner) {
  return std::make_shared<AnonymizingBackend>(std::move(inner), profile_);
}

StoragePluginSet::StoragePluginSet(std::filesystem::path file_root)
    : plugins_{std::make_shared<FileStoragePlugin>(std::move(file_root)), std::make_shared<MemoryStoragePlugin>(),
               std::make_shared<GzipStoragePlugin>(), std::make_shared<AnonymizeStoragePlugin>()} {}

}  // namespace minipacs::storage
