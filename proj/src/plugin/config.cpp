// SPDX-License-Identifier: Apache-2.0
#include "minipacs/plugin/config.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "minipacs/error.hpp"

namespace minipacs::plugin {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(Errc::Malformed, msg); }

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const json* member(const json& obj, const char* key, const char* where) {
  if (!obj.is_object()) malformed(fmt::format("{} must be an object", where));
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json* object_member(const json& obj, const char* key) {
  const json* v = member(obj, key, "configuration");
  if (v && !v->is_object()) malformed(fmt::format("\"{}\" must be an object", key));
  return v;
}

std::string string_field(const json& v, const std::string& key) {
  if (!v.is_string()) malformed(fmt::format("\"{}\" must be a string", key));
  return v.get<std::string>();
}

std::uint16_t port_field(const json& v, const std::string& key) {
  if (!v.is_number_integer()) malformed(fmt::format("\"{}\" must be an integer", key));
  auto n = v.get<std::int64_t>();
  if (n < 0 || n > 65535) malformed(fmt::format("\"{}\" out of range: {}", key, n));
  return static_cast<std::uint16_t>(n);
}

fs::path path_field(const json& v, const std::string& key, const fs::path& base) {
  fs::path p = string_field(v, key);
  if (p.empty()) malformed(fmt::format("\"{}\" must not be empty", key));
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

Parameters settings_field(const json& v, const std::string& plugin) {
  if (!v.is_object()) malformed(fmt::format("settings of plugin \"{}\" must be an object", plugin));
  Parameters out;
  for (auto& [k, val] : v.items()) {
    if (val.is_string()) {
      out[k] = val.get<std::string>();
    } else if (val.is_number() || val.is_boolean()) {
      out[k] = val.dump();
    } else {
      malformed(fmt::format("setting \"{}\" of plugin \"{}\" must be a scalar", k, plugin));
    }
  }
  return out;
}

ArchiveConfig from_document(const json& doc, const fs::path& base) {
  if (!doc.is_object()) malformed("configuration must be a JSON object");
  ArchiveConfig cfg;
  cfg.storage_root = base / cfg.storage_root;
  cfg.index_path = base / cfg.index_path;
  cfg.webui_dir = base / cfg.webui_dir;

  if (auto* v = member(doc, "aetitle", "configuration")) {
    cfg.aetitle = string_field(*v, "aetitle");
    if (cfg.aetitle.empty() || cfg.aetitle.size() > 16) malformed("\"aetitle\" must be 1 to 16 characters");
  }
  if (auto* d = object_member(doc, "dimse")) {
    if (auto* v = member(*d, "port", "dimse")) cfg.dimse_port = port_field(*v, "dimse.port");
  }
  if (auto* h = object_member(doc, "http")) {
    if (auto* v = member(*h, "port", "http")) cfg.http_port = port_field(*v, "http.port");
    if (auto* v = member(*h, "token", "http"); v && !v->is_null()) {
      cfg.token = string_field(*v, "http.token");
      if (cfg.token->empty()) cfg.token.reset();
    }
  }
  if (auto* s = object_member(doc, "storage")) {
    if (auto* v = member(*s, "scheme", "storage")) cfg.storage_scheme = string_field(*v, "storage.scheme");
    if (auto* v = member(*s, "root", "storage")) cfg.storage_root = path_field(*v, "storage.root", base);
  }
  if (auto* i = object_member(doc, "index")) {
    if (auto* v = member(*i, "path", "index")) cfg.index_path = path_field(*v, "index.path", base);
  }
  if (auto* w = object_member(doc, "webui")) {
    if (auto* v = member(*w, "dir", "webui")) cfg.webui_dir = path_field(*v, "webui.dir", base);
  }
  if (auto* t = object_member(doc, "tasks")) {
    if (auto* v = member(*t, "workers", "tasks")) {
      if (!v->is_number_integer() || v->get<std::int64_t>() < 1 || v->get<std::int64_t>() > 64)
        malformed("\"tasks.workers\" must be an integer between 1 and 64");
      cfg.workers = v->get<std::size_t>();
    }
  }
  if (auto* p = member(doc, "plugins", "configuration")) {
    if (!p->is_array()) malformed("\"plugins\" must be an array");
    std::set<std::string> seen;
    for (auto& entry : *p) {
      if (!entry.is_object()) malformed("plugin entries must be objects");
      PluginConfig pc;
      auto* name = member(entry, "name", "plugin entry");
      if (!name) malformed("plugin entry without \"name\"");
      pc.name = string_field(*name, "name");
      if (!seen.insert(pc.name).second) malformed(fmt::format("duplicate plugin name \"{}\"", pc.name));
      if (auto* v = member(entry, "enabled", "plugin entry")) {
        if (!v->is_boolean()) malformed(fmt::format("\"enabled\" of plugin \"{}\" must be a boolean", pc.name));
        pc.enabled = v->get<bool>();
      }
      if (auto* v = member(entry, "settings", "plugin entry")) pc.settings = settings_field(*v, pc.name);
      cfg.plugins.push_back(std::move(pc));
    }
  }
  return cfg;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte);
    malformed(fmt::format("line {}, column {}: {}", line, col, e.what()));
  }
}

}  // namespace

const PluginConfig* ArchiveConfig::plugin(std::string_view name) const {
  for (auto& p : plugins) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

ArchiveConfig parse_config(std::string_view text, const fs::path& base_dir) {
  return from_document(parse_document(text), base_dir);
}

json default_config_document(std::span<const PluginConfig> builtin_plugins) {
  json plugins = json::array();
  for (auto& p : builtin_plugins) {
    json settings = json::object();
    for (auto& [k, v] : p.settings) settings[k] = v;
    plugins.push_back({{"name", p.name}, {"enabled", p.enabled}, {"settings", settings}});
  }
  return json{{"aetitle", "MINIPACS"},
              {"dimse", {{"port", 11112}}},
              {"http", {{"port", 8080}, {"token", nullptr}}},
              {"storage", {{"scheme", "file"}, {"root", "storage"}}},
              {"index", {{"path", "index/minipacs.mpix"}}},
              {"tasks", {{"workers", 2}}},
              {"plugins", plugins},
              {"webui", {{"dir", "webui"}}}};
}

void write_file_atomically(const fs::path& path, std::string_view text) {
  static std::atomic<std::uint64_t> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += fmt::format(".tmp-{}-{}", ::getpid(), counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, fmt::format("cannot write {}", tmp.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(Errc::IoFailure, fmt::format("short write to {}", tmp.string()));
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::IoFailure, fmt::format("cannot replace {}", path.string()));
  }
}

ConfigStore::ConfigStore(fs::path path, ArchiveConfig config, json document)
    : path_(std::move(path)), config_(std::move(config)), document_(std::move(document)) {}

std::shared_ptr<ConfigStore> ConfigStore::load(const fs::path& path, std::span<const PluginConfig> builtin_plugins) {
  auto abs = fs::absolute(path);
  auto base = abs.parent_path();
  std::error_code ec;
  if (!fs::exists(abs, ec)) {
    auto doc = default_config_document(builtin_plugins);
    write_file_atomically(abs, doc.dump(2) + "\n");
    auto cfg = from_document(doc, base);
    return std::shared_ptr<ConfigStore>(new ConfigStore(abs, std::move(cfg), std::move(doc)));
  }
  std::ifstream in(abs, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, fmt::format("cannot read {}", abs.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  auto text = ss.str();
  auto doc = parse_document(text);
  auto cfg = from_document(doc, base);
  return std::shared_ptr<ConfigStore>(new ConfigStore(abs, std::move(cfg), std::move(doc)));
}

std::shared_ptr<ConfigStore> ConfigStore::in_memory(ArchiveConfig config) {
  return std::shared_ptr<ConfigStore>(new ConfigStore({}, std::move(config), json::object()));
}

ArchiveConfig ConfigStore::config() const {
  std::lock_guard lock(mutex_);
  return config_;
}

void ConfigStore::set_plugin_enabled(const std::string& name, bool enabled) {
  std::lock_guard lock(mutex_);
  auto previous_doc = document_;
  auto previous_cfg = config_;

  bool found = false;
  for (auto& p : config_.plugins) {
    if (p.name == name) {
      p.enabled = enabled;
      found = true;
    }
  }
  if (!found) config_.plugins.push_back({name, enabled, {}});

  if (!path_.empty()) {
    auto& list = document_["plugins"];
    if (!list.is_array()) list = json::array();
    bool in_doc = false;
    for (auto& entry : list) {
      if (entry.value("name", "") == name) {
        entry["enabled"] = enabled;
        in_doc = true;
      }
    }
    if (!in_doc) list.push_back({{"name", name}, {"enabled", enabled}, {"settings", json::object()}});
    try {
      persist();
    } catch (...) {
      document_ = std::move(previous_doc);
      config_ = std::move(previous_cfg);
      throw;
    }
  }
}

void ConfigStore::persist() const { write_file_atomically(path_, document_.dump(2) + "\n"); }

}  // namespace minipacs::plugin
