// SPDX-License-Identifier: Apache-2.0
// minipacs: archive server and offline index/query/dump commands.
//
// Exit codes: 0 success, 1 operation failed (index errors, unparsable
// object), 2 usage/config/input error, 3 port bind failure.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "minipacs/archive/archive.hpp"
#include "minipacs/dicom/codec.hpp"
#include "minipacs/dicom/dictionary.hpp"
#include "minipacs/error.hpp"
#include "minipacs/http/server.hpp"
#include "minipacs/net/scp.hpp"
#include "minipacs/storage/gzip.hpp"

namespace fs = std::filesystem;
using namespace minipacs;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;
constexpr int kBindFailure = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::unique_ptr<archive::Archive> open_archive(const std::string& config_path) {
  try {
    auto builtins = archive::builtin_plugin_configs();
    auto store = plugin::ConfigStore::load(config_path, builtins);
    auto a = std::make_unique<archive::Archive>(store);
    a->load_index();
    return a;
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}: {}", config_path, e.what()));
  }
}

int serve(const std::string& config_path) {
  // Signals are taken synchronously by this thread; block them before any
  // worker thread exists so they all inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto archive = open_archive(config_path);
  const auto& cfg = archive->config();

  net::ScpConfig scp_config;
  scp_config.aetitle = cfg.aetitle;
  scp_config.port = cfg.dimse_port;
  net::DimseServer dimse(scp_config, archive->scp_handlers());
  http::HttpServer web(archive->api(), "0.0.0.0", cfg.http_port);
  try {
    dimse.start();
    web.start();
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kBindFailure;
  }
  spdlog::info("ready: AE {} on DIMSE port {}, HTTP port {}", cfg.aetitle, dimse.port(), web.port());

  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("signal {}: stopping", sig);
  dimse.stop();
  web.stop();
  archive->shutdown();
  spdlog::info("index flushed with {} documents", archive->inverted_index()->size());
  return kOk;
}

int index_tree(const std::string& path, const std::string& config_path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    spdlog::error("{}: no such file or directory", path);
    return kBadInput;
  }
  auto archive = open_archive(config_path);
  auto& dispatcher = archive->dispatcher();
  auto task = dispatcher.dispatch_index({storage::StorageUri::from_path(path)});
  auto done = archive->tasks().wait(task.id);
  archive->shutdown();
  auto report = done.report.value_or(plugin::Report{});
  std::cout << http::report_json(report).dump(2) << "\n";
  return done.state == plugin::TaskState::Done && report.errors.empty() ? kOk : kFailed;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

int query(const std::string& expression, std::size_t max, const std::string& fields, const std::string& config_path) {
  auto archive = open_archive(config_path);
  plugin::QueryOptions options;
  options.max_hits = max;
  options.fields_filter = split_csv(fields);
  plugin::ResultSet rs;
  try {
    rs = archive->dispatcher().query(expression, options);
  } catch (const QuerySyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kBadInput;
  }
  for (const auto& hit : rs.hits) {
    nlohmann::json selected = nlohmann::json::object();
    if (!options.fields_filter.empty()) selected = hit.fields;
    std::cout << hit.uri << '\t' << hit.score << '\t' << selected.dump() << '\n';
  }
  return kOk;
}

std::string render_value(const dicom::DataElement& el) {
  if (const auto* bytes = el.byte_values()) return fmt::format("<{} bytes>", bytes->size());
  auto values = el.value_strings();
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "\\" : "") + values[i];
  return out;
}

void dump_dataset(const dicom::DataSet& ds, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& [tag, el] : ds) {
    auto entry = dicom::dict_lookup(tag);
    std::string keyword = entry ? std::string(entry->keyword) : (tag.is_private() ? "Private" : "Unknown");
    if (const auto* items = el.items()) {
      std::cout << fmt::format("{}{} SQ {}: {} item(s)\n", indent, tag.str(), keyword, items->size());
      for (std::size_t i = 0; i < items->size(); ++i) {
        std::cout << fmt::format("{}  item {}\n", indent, i + 1);
        dump_dataset((*items)[i], depth + 2);
      }
      continue;
    }
    std::cout << fmt::format("{}{} {} {}: {}\n", indent, tag.str(), dicom::vr_name(el.vr()), keyword, render_value(el));
  }
}

int dump(const std::string& text, const std::string& config_path) {
  auto archive = open_archive(config_path);
  storage::ByteBuffer bytes;
  try {
    auto uri = storage::StorageUri::parse(text);
    bytes = archive->dispatcher().resolve(uri)->at(uri);
  } catch (const Error& e) {
    spdlog::error("{}: {}", text, e.what());
    return kBadInput;
  }
  try {
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) bytes = storage::gzip_decompress(bytes);
    auto obj = dicom::parse_object(bytes);
    dump_dataset(obj.meta(), 0);
    dump_dataset(obj.dataset(), 0);
  } catch (const Error& e) {
    std::cerr << fmt::format("{}: {}\n", text, e.what());
    return kFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("minipacs");
  logger->set_pattern("%Y-%m-%dT%H:%M:%S.%e %l %v");
  spdlog::set_default_logger(logger);

  CLI::App app{"minipacs: extensible DICOM archive"};
  app.require_subcommand(1);
  std::string config_path = "minipacs.json";
  app.add_option("--config", config_path, "Configuration file (created with defaults when missing)");

  auto* serve_cmd = app.add_subcommand("serve", "Run the DIMSE and HTTP servers until interrupted");

  std::string index_path;
  auto* index_cmd = app.add_subcommand("index", "Index a file or directory tree and print the report");
  index_cmd->add_option("path", index_path, "File or directory")->required();

  std::string expression;
  std::size_t max = 0;
  std::string fields;
  auto* query_cmd = app.add_subcommand("query", "Search the index snapshot");
  query_cmd->add_option("expression", expression, "Query expression")->required();
  query_cmd->add_option("--max", max, "Maximum number of hits (0 = all)");
  query_cmd->add_option("--fields", fields, "Comma-separated fields to print");

  std::string uri;
  auto* dump_cmd = app.add_subcommand("dump", "Print every element of a stored object");
  dump_cmd->add_option("uri", uri, "Storage uri, e.g. file:///srv/a.dcm")->required();

  for (auto* sub : {serve_cmd, index_cmd, query_cmd, dump_cmd})
    sub->add_option("--config", config_path, "Configuration file (created with defaults when missing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    if (*serve_cmd) return serve(config_path);
    if (*index_cmd) {
      logger->set_level(spdlog::level::warn);
      return index_tree(index_path, config_path);
    }
    if (*query_cmd) {
      logger->set_level(spdlog::level::warn);
      return query(expression, max, fields, config_path);
    }
    if (*dump_cmd) {
      logger->set_level(spdlog::level::warn);
      return dump(uri, config_path);
    }
  } catch (const ConfigError& e) {
    spdlog::error("configuration: {}", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailed;
  }
  return kBadInput;
}
