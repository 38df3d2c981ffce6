// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "minipacs/plugin/plugin.hpp"

namespace minipacs::plugin {

struct PluginConfig {
  std::string name;
  bool enabled = true;
  Parameters settings;
};

/// The archive configuration file, with relative paths resolved against the
/// file's directory.
struct ArchiveConfig {
  std::string aetitle = "MINIPACS";
  std::uint16_t dimse_port = 11112;
  std::uint16_t http_port = 8080;
  std::optional<std::string> token;
  std::string storage_scheme = "file";
  std::filesystem::path storage_root = "storage";
  std::filesystem::path index_path = "index/minipacs.mpix";
  std::filesystem::path webui_dir = "webui";
  std::size_t workers = 2;
  std::vector<PluginConfig> plugins;

  const PluginConfig* plugin(std::string_view name) const;
};

/// Throws Error(Malformed) with line and column for syntax errors, or the
/// offending key for schema errors and duplicate plugin names.
ArchiveConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);

nlohmann::json default_config_document(std::span<const PluginConfig> builtin_plugins);

/// Owns the configuration and its backing file; plugin enable/disable
/// changes are written back atomically (temp file + rename).
class ConfigStore {
 public:
  /// A missing file yields the defaults and writes them to `path`.
  static std::shared_ptr<ConfigStore> load(const std::filesystem::path& path,
                                           std::span<const PluginConfig> builtin_plugins = {});
  /// No backing file; changes stay in memory.
  static std::shared_ptr<ConfigStore> in_memory(ArchiveConfig config);

  ArchiveConfig config() const;
  const std::filesystem::path& path() const noexcept { return path_; }

  void set_plugin_enabled(const std::string& name, bool enabled);

 private:
  ConfigStore(std::filesystem::path path, ArchiveConfig config, nlohmann::json document);
  void persist() const;

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  ArchiveConfig config_;
  nlohmann::json document_;
};

/// Writes `text` to `path` through a temp file in the same directory and a
/// rename. Throws Error(IoFailure).
void write_file_atomically(const std::filesystem::path& path, std::string_view text);

}  // namespace minipacs::plugin
