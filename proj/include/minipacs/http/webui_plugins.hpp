// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minipacs/plugin/plugin.hpp"

namespace minipacs::http {

inline constexpr std::string_view kSlotIds[] = {"menu", "result-option", "result-batch", "settings"};
bool valid_slot_id(std::string_view slot) noexcept;

/// A drop-in UI package: <dir>/<name>/package.json plus its module file.
class WebUiPackage final : public plugin::WebUiPlugin {
 public:
  WebUiPackage(std::filesystem::path directory, plugin::WebUiDescriptor descriptor)
      : directory_(std::move(directory)), descriptor_(std::move(descriptor)) {}

  /// Reads and validates `<directory>/package.json`. Throws Error(Malformed)
  /// when the manifest is unreadable, lacks a field, names an unknown slot,
  /// or its module file is missing.
  static std::shared_ptr<WebUiPackage> load(const std::filesystem::path& directory);

  std::string name() const override { return descriptor_.name; }
  plugin::WebUiDescriptor descriptor() const override { return descriptor_; }
  std::optional<std::string> read_asset(std::string_view relative_path) const override;
  const std::filesystem::path& directory() const noexcept { return directory_; }

 private:
  std::filesystem::path directory_;
  plugin::WebUiDescriptor descriptor_;
};

/// Every valid package found directly under `root` at construction, by
/// directory name. Invalid packages are skipped with a warning.
class WebUiPluginSet final : public plugin::PluginSet {
 public:
  explicit WebUiPluginSet(const std::filesystem::path& root);
  std::string name() const override { return "webui"; }
  std::vector<std::shared_ptr<plugin::Plugin>> plugins() const override { return plugins_; }

 private:
  std::vector<std::shared_ptr<plugin::Plugin>> plugins_;
};

}  // namespace minipacs::http
