// SPDX-License-Identifier: Apache-2.0
#include "minipacs/plugin/registry.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include <fmt/format.h>

#include "minipacs/error.hpp"

namespace minipacs::plugin {

PluginRegistry::PluginRegistry(std::shared_ptr<ConfigStore> config) : config_(std::move(config)) {}

void PluginRegistry::register_plugin_set(const std::shared_ptr<PluginSet>& set) {
  if (!set) throw Error(Errc::InvalidObject, "null plugin set");
  auto set_name = set->name();
  auto members = set->plugins();
  std::optional<ArchiveConfig> cfg;
  if (config_) cfg = config_->config();

  std::unique_lock lock(mutex_);
  if (std::find(set_names_.begin(), set_names_.end(), set_name) != set_names_.end())
    throw Error(Errc::DuplicateName, fmt::format("plugin set \"{}\" already registered", set_name));

  std::vector<Entry> added;
  std::set<std::string> names;
  for (auto& plugin : members) {
    if (!plugin) continue;
    auto name = plugin->name();
    if (find_entry(name) || !names.insert(name).second)
      throw Error(Errc::DuplicateName, fmt::format("plugin \"{}\" already registered", name));
    PluginManifest m{name, plugin->kind(), plugin->enabled_by_default(), set_name, {}};
    if (cfg) {
      if (auto* pc = cfg->plugin(name)) {
        m.enabled = pc->enabled;
        m.settings = pc->settings;
      }
    }
    added.push_back({std::move(m), plugin});
  }
  for (auto& e : added) e.plugin->configure(e.manifest.settings);
  set_names_.push_back(set_name);
  for (auto& e : added) entries_.push_back(std::move(e));
}

const PluginRegistry::Entry* PluginRegistry::find_entry(std::string_view name) const {
  for (auto& e : entries_) {
    if (e.manifest.name == name) return &e;
  }
  return nullptr;
}

std::vector<std::shared_ptr<Plugin>> PluginRegistry::plugins_of_kind(PluginKind kind) const {
  std::shared_lock lock(mutex_);
  std::vector<std::shared_ptr<Plugin>> out;
  for (auto& e : entries_) {
    if (e.manifest.kind == kind && e.manifest.enabled) out.push_back(e.plugin);
  }
  return out;
}

std::vector<PluginManifest> PluginRegistry::manifests() const {
  std::shared_lock lock(mutex_);
  std::vector<PluginManifest> out;
  for (auto& e : entries_) out.push_back(e.manifest);
  return out;
}

std::vector<PluginSetHandle> PluginRegistry::plugin_sets() const {
  std::shared_lock lock(mutex_);
  std::vector<PluginSetHandle> out;
  for (auto& s : set_names_) {
    PluginSetHandle h{s, {}};
    for (auto& e : entries_) {
      if (e.manifest.set_name == s) h.members.push_back(e.manifest);
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::optional<PluginManifest> PluginRegistry::manifest(std::string_view name) const {
  std::shared_lock lock(mutex_);
  if (auto* e = find_entry(name)) return e->manifest;
  return std::nullopt;
}

bool PluginRegistry::is_enabled(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto* e = find_entry(name);
  return e && e->manifest.enabled;
}

std::shared_ptr<Plugin> PluginRegistry::find_enabled(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto* e = find_entry(name);
  return e && e->manifest.enabled ? e->plugin : nullptr;
}

void PluginRegistry::set_plugin_enabled(std::string_view name, bool enabled) {
  std::unique_lock lock(mutex_);
  auto* e = const_cast<Entry*>(find_entry(name));
  if (!e) throw Error(Errc::UnknownPlugin, fmt::format("no plugin named \"{}\"", name));
  if (config_) config_->set_plugin_enabled(std::string(name), enabled);
  e->manifest.enabled = enabled;
}

std::size_t PluginRegistry::config_rank(std::string_view name) const {
  if (!config_) return 0;
  auto cfg = config_->config();
  for (std::size_t i = 0; i < cfg.plugins.size(); ++i) {
    if (cfg.plugins[i].name == name) return i;
  }
  return cfg.plugins.size();
}

void register_in_scan_order(PluginRegistry& registry, std::vector<std::shared_ptr<PluginSet>> sets) {
  std::stable_sort(sets.begin(), sets.end(), [](auto& a, auto& b) { return a->name() < b->name(); });
  for (auto& s : sets) registry.register_plugin_set(s);
}

}  // namespace minipacs::plugin
