// SPDX-License-Identifier: Apache-2.0
#include "minipacs/plugin/plugin.hpp"

namespace minipacs::plugin {

std::string_view kind_name(PluginKind kind) noexcept {
  switch (kind) {
    case PluginKind::Indexer: return "indexer";
    case PluginKind::QueryProvider: return "query";
    case PluginKind::Storage: return "storage";
    case PluginKind::WebService: return "webservice";
    case PluginKind::WebUI: return "webui";
  }
  return "unknown";
}

std::optional<PluginKind> parse_kind(std::string_view name) noexcept {
  for (auto k : kAllKinds) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace minipacs::plugin
