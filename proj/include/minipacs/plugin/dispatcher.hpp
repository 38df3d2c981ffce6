// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minipacs/dicom/dataset.hpp"
#include "minipacs/plugin/plugin.hpp"
#include "minipacs/plugin/registry.hpp"
#include "minipacs/plugin/task_engine.hpp"

namespace minipacs::plugin {

/// Routes core operations to the enabled plugins: storage resolution,
/// asynchronous indexing fan-out, unindexing and queries.
class Dispatcher {
 public:
  Dispatcher(const PluginRegistry& registry, TaskEngine& tasks, std::string default_scheme = "file");

  /// Backend chain for the uri's scheme: the first enabled provider plugin
  /// for that scheme, wrapped by every enabled transform plugin (the
  /// transform listed first in the configuration is outermost). Throws
  /// Error(NoStorage).
  std::shared_ptr<storage::StorageBackend> resolve(const storage::StorageUri& uri) const;
  std::shared_ptr<storage::StorageBackend> resolve_scheme(std::string_view scheme) const;

  /// Stores through the default scheme's chain.
  storage::StorageUri store(const dicom::DicomObject& obj) const;

  /// Expands directories, then hands each item to every enabled indexer
  /// that handles it, on a task worker. Returns at once. Throws
  /// Error(NoStorage) for an unknown scheme before queuing anything.
  TaskSnapshot dispatch_index(std::vector<storage::StorageUri> uris, Parameters parameters = {}) const;

  std::optional<TaskSnapshot> task_status(std::string_view id) const { return tasks_.status(id); }

  /// Synchronous. One report entry per enabled indexer consulted;
  /// files_indexed counts those that removed the document.
  Report dispatch_unindex(const storage::StorageUri& uri) const;

  /// Runs `text` on the named provider, or the first enabled one. Throws
  /// Error(UnknownPlugin) when no such enabled provider exists.
  ResultSet query(std::string_view text, const QueryOptions& options,
                  const std::optional<std::string>& provider = std::nullopt) const;

  /// Context handed to plugin sets: reads go through resolve().
  PluginContext context() const;

  const PluginRegistry& registry() const noexcept { return registry_; }
  TaskEngine& tasks() const noexcept { return tasks_; }
  const std::string& default_scheme() const noexcept { return default_scheme_; }

 private:
  const PluginRegistry& registry_;
  TaskEngine& tasks_;
  std::string default_scheme_;
};

}  // namespace minipacs::plugin
