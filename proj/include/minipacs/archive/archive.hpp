// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "minipacs/http/api.hpp"
#include "minipacs/index/inverted_index.hpp"
#include "minipacs/net/scp.hpp"
#include "minipacs/plugin/config.hpp"
#include "minipacs/plugin/dispatcher.hpp"
#include "minipacs/plugin/registry.hpp"
#include "minipacs/plugin/task_engine.hpp"

namespace minipacs::archive {

/// Every built-in plugin with its default enabled flag, as written to a
/// fresh configuration file.
std::vector<plugin::PluginConfig> builtin_plugin_configs();

/// C-STORE goes to storage then asynchronous indexing; C-FIND runs on the
/// query plugins.
class ArchiveHandlers final : public net::ScpHandlers {
 public:
  explicit ArchiveHandlers(const plugin::Dispatcher& dispatcher) : dispatcher_(dispatcher) {}
  std::uint16_t on_store(const dicom::DicomObject& obj) override;
  net::FindOutcome on_find(const dicom::DataSet& identifier) override;

 private:
  const plugin::Dispatcher& dispatcher_;
};

/// The assembled core: configuration, registry with the built-in plugin
/// sets, task workers, dispatcher, and the protocol front ends' handlers.
class Archive {
 public:
  /// `extra` sets are registered together with the built-in ones, in scan
  /// order. Throws Error(DuplicateName) on clashing names.
  explicit Archive(std::shared_ptr<plugin::ConfigStore> config,
                   std::vector<std::shared_ptr<plugin::PluginSet>> extra = {});
  ~Archive();
  Archive(const Archive&) = delete;
  Archive& operator=(const Archive&) = delete;

  const plugin::ArchiveConfig& config() const noexcept { return config_; }
  plugin::PluginRegistry& registry() noexcept { return registry_; }
  plugin::TaskEngine& tasks() noexcept { return tasks_; }
  const plugin::Dispatcher& dispatcher() const noexcept { return dispatcher_; }
  const std::shared_ptr<index::InvertedIndex>& inverted_index() const noexcept { return index_; }
  net::ScpHandlers& scp_handlers() noexcept { return handlers_; }
  const http::Api& api() const noexcept { return *api_; }

  /// Replaces the index contents with the snapshot at the configured path;
  /// a missing snapshot leaves it empty. Throws Error(Corrupt).
  void load_index();
  void flush_index() const;
  /// Finishes queued tasks, stops the workers and flushes the index.
  /// Idempotent.
  void shutdown();

 private:
  std::shared_ptr<plugin::ConfigStore> store_;
  plugin::ArchiveConfig config_;
  plugin::PluginRegistry registry_;
  plugin::TaskEngine tasks_;
  plugin::Dispatcher dispatcher_;
  std::shared_ptr<index::InvertedIndex> index_;
  ArchiveHandlers handlers_;
  std::unique_ptr<http::Api> api_;
  bool shut_down_ = false;
};

}  // namespace minipacs::archive
