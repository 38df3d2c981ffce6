// SPDX-License-Identifier: Apache-2.0
#include "minipacs/http/api.hpp"

#include <regex>

#include <fmt/format.h>

#include "minipacs/error.hpp"
#include "minipacs/http/webui_plugins.hpp"
#include "minipacs/index/query.hpp"
#include "minipacs/storage/uri.hpp"

namespace minipacs::http {

using nlohmann::json;
using plugin::WebRequest;
using plugin::WebResponse;

namespace {

WebResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }
WebResponse json_error(int status, const std::string& message) { return json_response(status, {{"error", message}}); }

std::string content_type_for(std::string_view file) {
  auto dot = file.rfind('.');
  auto ext = dot == std::string_view::npos ? std::string_view{} : file.substr(dot);
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".json") return "application/json";
  if (ext == ".css") return "text/css";
  if (ext == ".html") return "text/html";
  return "application/octet-stream";
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    out.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

// Free text: each whitespace-separated word becomes an unfielded term.
std::string free_text_query(std::string_view text) {
  std::vector<index::QueryNode> terms;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    auto start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) terms.push_back(index::QueryNode::term(std::nullopt, std::string(text.substr(start, i - start))));
  }
  if (terms.empty()) return {};
  return index::to_string(index::QueryNode::conj(std::move(terms)));
}

}  // namespace

json report_json(const plugin::Report& report) {
  json errors = json::array();
  for (const auto& e : report.errors) errors.push_back({{"uri", e.uri}, {"message", e.message}});
  return {{"files_seen", report.files_seen},
          {"files_indexed", report.files_indexed},
          {"errors", std::move(errors)},
          {"elapsed_ms", report.elapsed.count()}};
}

json task_json(const plugin::TaskSnapshot& task) {
  json out = {{"id", task.id}, {"state", std::string(plugin::task_state_name(task.state))}, {"progress", task.progress}};
  if (task.report) out["report"] = report_json(*task.report);
  return out;
}

bool Api::authorized(const WebRequest& req) const {
  if (!token_) return true;
  auto it = req.headers.find("Authorization");
  return it != req.headers.end() && it->second == "Bearer " + *token_;
}

WebResponse Api::handle(const WebRequest& req) const {
  const auto& p = req.path;
  const bool get = req.method == "GET";
  const bool post = req.method == "POST";
  if (p.starts_with("/management/") && !authorized(req)) return json_error(401, "missing or invalid bearer token");

  if (p == "/search" && get) return search(req);
  if (p == "/management/index" && post) return index(req);
  if (p == "/management/unindex" && post) return unindex(req);
  if (p == "/management/tasks" && get) return tasks(req);
  if (p == "/management/plugins" && get) return list_plugins();
  if (p == "/management/plugins" && post) return set_plugin(req);
  if (p == "/webui" && get) return webui_list(req);
  if (p.starts_with("/webui/") && get) return webui_asset(req);

  bool path_known = false;
  for (const auto& service : registry_.enabled<plugin::WebServicePlugin>(plugin::PluginKind::WebService)) {
    for (const auto& route : service->routes()) {
      std::smatch m;
      if (!std::regex_match(p, m, std::regex(route.pattern))) continue;
      path_known = true;
      if (route.method != req.method) continue;
      WebRequest routed = req;
      routed.captures.assign(m.begin() + 1, m.end());
      return route.handler(routed);
    }
  }
  static const char* const kCorePaths[] = {"/search", "/management/index", "/management/unindex",
                                           "/management/tasks", "/management/plugins", "/webui"};
  for (auto core : kCorePaths) path_known = path_known || p == core;
  if (path_known) return json_error(405, "method not allowed");
  return json_error(404, "not found");
}

WebResponse Api::search(const WebRequest& req) const {
  auto text = req.param("query").value_or("");
  if (text.empty()) return json_error(400, "query must not be empty");
  auto keyword = req.param("keyword").value_or("true");
  if (keyword != "true" && keyword != "false") return json_error(400, "keyword must be true or false");
  if (keyword == "false") {
    text = free_text_query(text);
    if (text.empty()) return json_error(400, "query must not be empty");
  }
  plugin::QueryOptions options;
  if (auto max = req.param("max")) {
    try {
      std::size_t used = 0;
      auto n = std::stoull(*max, &used);
      if (used != max->size()) throw std::invalid_argument("max");
      options.max_hits = n;
    } catch (const std::exception&) {
      return json_error(400, "max must be a non-negative integer");
    }
  }
  try {
    auto rs = dispatcher_.query(text, options, req.param("provider"));
    json results = json::array();
    for (const auto& hit : rs.hits) results.push_back({{"uri", hit.uri}, {"score", hit.score}, {"fields", hit.fields}});
    return json_response(200, {{"results", std::move(results)}, {"num_results", rs.total}, {"elapsed", rs.elapsed.count()}});
  } catch (const QuerySyntaxError& e) {
    return json_response(400, {{"error", e.what()}, {"position", e.position()}});
  } catch (const Error& e) {
    if (e.code() == Errc::UnknownPlugin) return json_error(404, e.what());
    return json_error(500, e.what());
  }
}

WebResponse Api::index(const WebRequest& req) const {
  auto text = req.param("uri");
  if (!text) return json_error(400, "uri is required");
  try {
    auto uri = storage::StorageUri::parse(*text);
    auto task = dispatcher_.dispatch_index({uri});
    return json_response(202, {{"task_id", task.id}});
  } catch (const Error& e) {
    if (e.code() == Errc::BadUri) return json_error(400, e.what());
    if (e.code() == Errc::NoStorage) return json_error(404, e.what());
    return json_error(500, e.what());
  }
}

WebResponse Api::unindex(const WebRequest& req) const {
  auto text = req.param("uri");
  if (!text) return json_error(400, "uri is required");
  try {
    auto uri = storage::StorageUri::parse(*text);
    dispatcher_.resolve(uri);
    return json_response(200, report_json(dispatcher_.dispatch_unindex(uri)));
  } catch (const Error& e) {
    if (e.code() == Errc::BadUri) return json_error(400, e.what());
    if (e.code() == Errc::NoStorage) return json_error(404, e.what());
    return json_error(500, e.what());
  }
}

WebResponse Api::tasks(const WebRequest& req) const {
  if (auto id = req.param("id")) {
    auto snap = dispatcher_.task_status(*id);
    if (!snap) return json_error(404, fmt::format("no task {}", *id));
    return json_response(200, task_json(*snap));
  }
  json out = json::array();
  for (const auto& t : dispatcher_.tasks().list()) out.push_back(task_json(t));
  return json_response(200, out);
}

WebResponse Api::list_plugins() const {
  json out = json::array();
  for (const auto& m : registry_.manifests()) {
    out.push_back({{"name", m.name}, {"kind", std::string(plugin::kind_name(m.kind))}, {"enabled", m.enabled}, {"set", m.set_name}});
  }
  return json_response(200, out);
}

WebResponse Api::set_plugin(const WebRequest& req) const {
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::parse_error&) {
    return json_error(400, "body must be JSON {\"name\": string, \"enabled\": bool}");
  }
  if (!body.is_object() || !body.contains("name") || !body["name"].is_string() || !body.contains("enabled") ||
      !body["enabled"].is_boolean())
    return json_error(400, "body must be JSON {\"name\": string, \"enabled\": bool}");
  auto name = body["name"].get<std::string>();
  try {
    registry_.set_plugin_enabled(name, body["enabled"].get<bool>());
  } catch (const Error& e) {
    if (e.code() == Errc::UnknownPlugin) return json_error(404, e.what());
    return json_error(500, e.what());
  }
  auto m = *registry_.manifest(name);
  return json_response(200, {{"name", m.name}, {"kind", std::string(plugin::kind_name(m.kind))}, {"enabled", m.enabled}, {"set", m.set_name}});
}

WebResponse Api::webui_list(const WebRequest& req) const {
  auto slot = req.param("slot-id");
  if (slot && !valid_slot_id(*slot)) return json_error(400, fmt::format("unknown slot-id \"{}\"", *slot));
  json plugins = json::array();
  for (const auto& ui : registry_.enabled<plugin::WebUiPlugin>(plugin::PluginKind::WebUI)) {
    auto d = ui->descriptor();
    if (slot && d.slot_id != *slot) continue;
    plugins.push_back({{"name", d.name}, {"slot-id", d.slot_id}, {"caption", d.caption}, {"module-file", d.module_file}});
  }
  return json_response(200, {{"plugins", std::move(plugins)}});
}

WebResponse Api::webui_asset(const WebRequest& req) const {
  auto segments = split_path(std::string_view(req.path).substr(std::string_view("/webui/").size()));
  for (const auto& s : segments) {
    if (s.empty() || s == "." || s == ".." || s.find('\\') != std::string::npos) return json_error(400, "invalid asset path");
  }
  if (segments.size() < 2) return json_error(404, "not found");
  std::shared_ptr<plugin::WebUiPlugin> owner;
  for (const auto& ui : registry_.enabled<plugin::WebUiPlugin>(plugin::PluginKind::WebUI)) {
    if (ui->name() == segments.front()) owner = ui;
  }
  if (!owner) return json_error(404, fmt::format("no web UI plugin {}", segments.front()));
  std::string rel;
  for (std::size_t i = 1; i < segments.size(); ++i) rel += (i > 1 ? "/" : "") + segments[i];
  auto content = owner->read_asset(rel);
  if (!content) return json_error(404, fmt::format("{} has no file {}", owner->name(), rel));
  return {200, content_type_for(rel), std::move(*content)};
}

}  // namespace minipacs::http
