// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "minipacs/plugin/config.hpp"
#include "minipacs/plugin/plugin.hpp"

namespace minipacs::plugin {

struct PluginManifest {
  std::string name;
  PluginKind kind = PluginKind::Indexer;
  bool enabled = true;
  std::string set_name;
  Parameters settings;

  bool operator==(const PluginManifest&) const = default;
};

struct PluginSetHandle {
  std::string name;
  std::vector<PluginManifest> members;
};

/// Registered plugin sets and the enabled flags that gate every dispatch
/// path. Readers run concurrently; enable/disable takes the writer lock.
class PluginRegistry {
 public:
  explicit PluginRegistry(std::shared_ptr<ConfigStore> config = nullptr);

  /// Registers every member; enabled flags and settings come from the
  /// configuration, falling back to each plugin's default. Throws
  /// Error(DuplicateName) on a repeated set or plugin name; nothing from
  /// the failing set is registered in that case.
  void register_plugin_set(const std::shared_ptr<PluginSet>& set);

  /// Enabled plugins of `kind` in registration order.
  std::vector<std::shared_ptr<Plugin>> plugins_of_kind(PluginKind kind) const;

  template <typename T>
  std::vector<std::shared_ptr<T>> enabled(PluginKind kind) const {
    std::vector<std::shared_ptr<T>> out;
    for (auto& p : plugins_of_kind(kind)) {
      if (auto typed = std::dynamic_pointer_cast<T>(p)) out.push_back(std::move(typed));
    }
    return out;
  }

  std::vector<PluginManifest> manifests() const;
  std::vector<PluginSetHandle> plugin_sets() const;
  std::optional<PluginManifest> manifest(std::string_view name) const;
  bool is_enabled(std::string_view name) const;

  /// Enabled plugin by name, or nullptr when unknown or disabled.
  std::shared_ptr<Plugin> find_enabled(std::string_view name) const;

  /// Flips the flag and persists it. Throws Error(UnknownPlugin).
  void set_plugin_enabled(std::string_view name, bool enabled);

  /// Position of the plugin in the configuration's plugin list, or the
  /// list size when it is not listed there.
  std::size_t config_rank(std::string_view name) const;

 private:
  struct Entry {
    PluginManifest manifest;
    std::shared_ptr<Plugin> plugin;
  };

  const Entry* find_entry(std::string_view name) const;

  std::shared_ptr<ConfigStore> config_;
  mutable std::shared_mutex mutex_;
  std::vector<Entry> entries_;
  std::vector<std::string> set_names_;
};

/// Registers sets in lexicographic order of their names.
void register_in_scan_order(PluginRegistry& registry, std::vector<std::shared_ptr<PluginSet>> sets);

}  // namespace minipacs::plugin
