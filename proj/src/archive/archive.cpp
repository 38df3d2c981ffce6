// SPDX-License-Identifier: Apache-2.0
#include "minipacs/archive/archive.hpp"

#include <spdlog/spdlog.h>

#include "minipacs/error.hpp"
#include "minipacs/http/dicomweb.hpp"
#include "minipacs/http/webui_plugins.hpp"
#include "minipacs/index/index_plugins.hpp"
#include "minipacs/net/find.hpp"
#include "minipacs/storage/storage_plugins.hpp"

namespace minipacs::archive {

std::vector<plugin::PluginConfig> builtin_plugin_configs() {
  return {
      {"meta-index", true, {}},     {"meta-query", true, {}},         {"file-storage", true, {}},
      {"mem-storage", true, {}},    {"gzip-storage", false, {}},      {"anonymize-storage", false, {}},
      {"dicomweb", true, {}},
  };
}

std::uint16_t ArchiveHandlers::on_store(const dicom::DicomObject& obj) {
  storage::StorageUri uri;
  try {
    uri = dispatcher_.store(obj);
  } catch (const Error& e) {
    spdlog::warn("C-STORE {} failed: {}", obj.sop_instance_uid(), e.what());
    return e.code() == Errc::InvalidObject ? net::status::kCannotUnderstand : net::status::kOutOfResources;
  } catch (const std::exception& e) {
    spdlog::warn("C-STORE {} failed: {}", obj.sop_instance_uid(), e.what());
    return net::status::kOutOfResources;
  }
  try {
    dispatcher_.dispatch_index({uri});
  } catch (const std::exception& e) {
    spdlog::warn("stored {} but could not queue indexing: {}", uri.str(), e.what());
  }
  return net::status::kSuccess;
}

net::FindOutcome ArchiveHandlers::on_find(const dicom::DataSet& identifier) {
  auto level_text = dicom::get_value_string(identifier, dicom::tags::kQueryRetrieveLevel);
  auto level = level_text ? net::parse_level(*level_text) : std::nullopt;
  if (!level) return {net::status::kIdentifierMismatch, {}};
  try {
    auto matches = net::find_matches(identifier, *level, [this](const std::string& q, const plugin::QueryOptions& o) {
      return dispatcher_.query(q, o);
    });
    return {net::status::kSuccess, std::move(matches)};
  } catch (const std::exception& e) {
    spdlog::warn("C-FIND failed: {}", e.what());
    return {net::status::kUnableToProcess, {}};
  }
}

Archive::Archive(std::shared_ptr<plugin::ConfigStore> config, std::vector<std::shared_ptr<plugin::PluginSet>> extra)
    : store_(std::move(config)),
      config_(store_->config()),
      registry_(store_),
      tasks_(config_.workers),
      dispatcher_(registry_, tasks_, config_.storage_scheme),
      handlers_(dispatcher_) {
  auto index_set = std::make_shared<index::IndexPluginSet>(dispatcher_.context());
  index_ = index_set->inverted_index();
  std::vector<std::shared_ptr<plugin::PluginSet>> sets = {
      index_set,
      std::make_shared<storage::StoragePluginSet>(config_.storage_root),
      std::make_shared<http::DicomWebPluginSet>(dispatcher_),
      std::make_shared<http::WebUiPluginSet>(config_.webui_dir),
  };
  for (auto& s : extra) sets.push_back(std::move(s));
  plugin::register_in_scan_order(registry_, std::move(sets));
  api_ = std::make_unique<http::Api>(dispatcher_, registry_, config_.token);
}

Archive::~Archive() {
  try {
    shutdown();
  } catch (const std::exception& e) {
    spdlog::error("shutdown: {}", e.what());
  }
}

void Archive::load_index() {
  if (config_.index_path.empty()) return;
  index_->load(config_.index_path);
  spdlog::info("index: {} documents from {}", index_->size(), config_.index_path.string());
}

void Archive::flush_index() const {
  if (config_.index_path.empty()) return;
  index_->flush(config_.index_path);
}

void Archive::shutdown() {
  if (shut_down_) return;
  shut_down_ = true;
  tasks_.drain();
  tasks_.shutdown();
  flush_index();
}

}  // namespace minipacs::archive
