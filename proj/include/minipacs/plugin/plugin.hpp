// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minipacs/plugin/report.hpp"
#include "minipacs/storage/backend.hpp"

namespace minipacs::plugin {

enum class PluginKind { Indexer, QueryProvider, Storage, WebService, WebUI };

inline constexpr PluginKind kAllKinds[] = {PluginKind::Indexer, PluginKind::QueryProvider, PluginKind::Storage,
                                           PluginKind::WebService, PluginKind::WebUI};

std::string_view kind_name(PluginKind kind) noexcept;
std::optional<PluginKind> parse_kind(std::string_view name) noexcept;

/// Opaque string parameters, passed through to plugins uninterpreted.
using Parameters = std::map<std::string, std::string>;

class Plugin {
 public:
  virtual ~Plugin() = default;

  virtual std::string name() const = 0;
  virtual PluginKind kind() const = 0;

  /// Enabled state when the configuration file does not mention the plugin.
  virtual bool enabled_by_default() const { return true; }

  /// Receives the settings object from the configuration file, once, at
  /// registration.
  virtual void configure(const Parameters& /*settings*/) {}
};

struct StorageItem {
  storage::StorageUri uri;
  storage::ByteBuffer bytes;
};

class IndexerPlugin : public Plugin {
 public:
  PluginKind kind() const final { return PluginKind::Indexer; }

  /// When false the core never passes `uri` to index().
  virtual bool handles(const storage::StorageUri& uri) const = 0;

  /// Indexes the items and reports the per-item outcome. The core runs this
  /// on a task worker, so it may block.
  virtual Report index(std::span<const StorageItem> items, const Parameters& parameters) = 0;

  /// True when the document was indexed and is now removed.
  virtual bool unindex(const storage::StorageUri& uri) = 0;
};

struct SearchHit {
  std::string uri;
  double score = 0;
  std::map<std::string, std::vector<std::string>> fields;

  bool operator==(const SearchHit&) const = default;
};

/// Hits sorted by (score desc, uri asc); total counts matches before
/// max_hits truncation.
struct ResultSet {
  std::vector<SearchHit> hits;
  std::size_t total = 0;
  std::chrono::milliseconds elapsed{0};
};

struct QueryOptions {
  std::size_t max_hits = 0;                // 0 means unlimited
  std::vector<std::string> fields_filter;  // empty means every field
  Parameters parameters;
};

class QueryPlugin : public Plugin {
 public:
  PluginKind kind() const final { return PluginKind::QueryProvider; }

  /// Errors in the query text surface as QuerySyntaxError.
  virtual ResultSet query(std::string_view text, const QueryOptions& options) = 0;
};

/// A storage plugin either provides a backend for one scheme or wraps the
/// backend chain with a transform.
class StoragePlugin : public Plugin {
 public:
  PluginKind kind() const final { return PluginKind::Storage; }

  virtual bool is_transform() const { return false; }
  /// Scheme served by a provider plugin; empty for transforms.
  virtual std::string scheme() const { return {}; }
  /// Provider plugins return their backend.
  virtual std::shared_ptr<storage::StorageBackend> backend() { return nullptr; }
  /// Transform plugins return `inner` wrapped.
  virtual std::shared_ptr<storage::StorageBackend> wrap(std::shared_ptr<storage::StorageBackend> inner) { return inner; }
};

struct WebRequest {
  std::string method;
  std::string path;
  std::vector<std::string> captures;  // regex groups of the matched route
  std::multimap<std::string, std::string> params;
  std::map<std::string, std::string> headers;
  std::string body;

  std::optional<std::string> param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  }
};

struct WebResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct WebRoute {
  std::string method;   // "GET", "POST", ...
  std::string pattern;  // ECMAScript regex over the full request path
  std::function<WebResponse(const WebRequest&)> handler;
};

class WebServicePlugin : public Plugin {
 public:
  PluginKind kind() const final { return PluginKind::WebService; }

  virtual std::vector<WebRoute> routes() = 0;
};

struct WebUiDescriptor {
  std::string name;
  std::string slot_id;  // menu, result-option, result-batch, settings
  std::string caption;
  std::string module_file;

  bool operator==(const WebUiDescriptor&) const = default;
};

class WebUiPlugin : public Plugin {
 public:
  PluginKind kind() const final { return PluginKind::WebUI; }

  virtual WebUiDescriptor descriptor() const = 0;
  /// Contents of a file of the package, addressed relative to its root.
  /// Callers reject traversal before asking.
  virtual std::optional<std::string> read_asset(std::string_view relative_path) const = 0;
};

/// Services the core offers to plugins.
struct PluginContext {
  /// Reads a stored object through the configured storage chain.
  std::function<storage::ByteBuffer(const storage::StorageUri&)> read;
};

/// A named bundle of plugins registered as one unit. Plugins that need to
/// share state do so inside their set.
class PluginSet {
 public:
  virtual ~PluginSet() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::shared_ptr<Plugin>> plugins() const = 0;
};

}  // namespace minipacs::plugin
