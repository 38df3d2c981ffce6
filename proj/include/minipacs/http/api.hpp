// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "minipacs/plugin/dispatcher.hpp"
#include "minipacs/plugin/plugin.hpp"
#include "minipacs/plugin/registry.hpp"

namespace minipacs::http {

nlohmann::json report_json(const plugin::Report& report);
nlohmann::json task_json(const plugin::TaskSnapshot& task);

/// Search, management and web UI endpoints, followed by the routes of every
/// enabled web service plugin. Transport independent.
class Api {
 public:
  /// With a token, every /management request must carry
  /// "Authorization: Bearer <token>".
  Api(const plugin::Dispatcher& dispatcher, plugin::PluginRegistry& registry, std::optional<std::string> token = std::nullopt)
      : dispatcher_(dispatcher), registry_(registry), token_(std::move(token)) {}

  plugin::WebResponse handle(const plugin::WebRequest& request) const;

 private:
  plugin::WebResponse search(const plugin::WebRequest& req) const;
  plugin::WebResponse index(const plugin::WebRequest& req) const;
  plugin::WebResponse unindex(const plugin::WebRequest& req) const;
  plugin::WebResponse tasks(const plugin::WebRequest& req) const;
  plugin::WebResponse list_plugins() const;
  plugin::WebResponse set_plugin(const plugin::WebRequest& req) const;
  plugin::WebResponse webui_list(const plugin::WebRequest& req) const;
  plugin::WebResponse webui_asset(const plugin::WebRequest& req) const;
  bool authorized(const plugin::WebRequest& req) const;

  const plugin::Dispatcher& dispatcher_;
  plugin::PluginRegistry& registry_;
  std::optional<std::string> token_;
};

}  // namespace minipacs::http
