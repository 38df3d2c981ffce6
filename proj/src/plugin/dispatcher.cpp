// SPDX-License-Identifier: Apache-2.0
#include "minipacs/plugin/dispatcher.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "minipacs/error.hpp"

namespace minipacs::plugin {

using storage::StorageBackend;
using storage::StorageUri;

Dispatcher::Dispatcher(const PluginRegistry& registry, TaskEngine& tasks, std::string default_scheme)
    : registry_(registry), tasks_(tasks), default_scheme_(std::move(default_scheme)) {}

std::shared_ptr<StorageBackend> Dispatcher::resolve_scheme(std::string_view scheme) const {
  auto storages = registry_.enabled<StoragePlugin>(PluginKind::Storage);
  std::shared_ptr<StorageBackend> backend;
  std::vector<std::shared_ptr<StoragePlugin>> transforms;
  for (auto& s : storages) {
    if (s->is_transform()) {
      transforms.push_back(s);
    } else if (!backend && s->scheme() == scheme) {
      backend = s->backend();
    }
  }
  if (!backend) throw Error(Errc::NoStorage, fmt::format("no enabled storage serves scheme \"{}\"", scheme));
  std::stable_sort(transforms.begin(), transforms.end(), [&](auto& a, auto& b) {
    return registry_.config_rank(a->name()) < registry_.config_rank(b->name());
  });
  for (auto it = transforms.rbegin(); it != transforms.rend(); ++it) backend = (*it)->wrap(backend);
  return backend;
}

std::shared_ptr<StorageBackend> Dispatcher::resolve(const StorageUri& uri) const { return resolve_scheme(uri.scheme); }

StorageUri Dispatcher::store(const dicom::DicomObject& obj) const { return resolve_scheme(default_scheme_)->store(obj); }

TaskSnapshot Dispatcher::dispatch_index(std::vector<StorageUri> uris, Parameters parameters) const {
  for (auto& u : uris) resolve(u);  // unknown schemes fail before queuing

  return tasks_.submit([this, uris = std::move(uris), parameters = std::move(parameters)](TaskProgress& progress) {
    Report report;
    std::vector<StorageUri> files;
    for (auto& u : uris) {
      try {
        auto listed = resolve(u)->list(u);
        if (listed.empty()) {
          report.add_error(u.str(), "nothing stored at this location");
          continue;
        }
        files.insert(files.end(), listed.begin(), listed.end());
      } catch (const std::exception& e) {
        report.add_error(u.str(), e.what());
      }
    }

    for (std::size_t i = 0; i < files.size(); ++i) {
      progress.set(static_cast<double>(i) / static_cast<double>(files.size()));
      const auto& file = files[i];

      std::vector<std::shared_ptr<IndexerPlugin>> handling;
      for (auto& indexer : registry_.enabled<IndexerPlugin>(PluginKind::Indexer)) {
        if (indexer->handles(file)) handling.push_back(indexer);
      }
      if (handling.empty()) {
        report.add_error(file.str(), "no enabled indexer handles this item");
        continue;
      }

      StorageItem item{file, {}};
      try {
        item.bytes = resolve(file)->at(file);
      } catch (const std::exception& e) {
        report.add_error(file.str(), e.what());
        continue;
      }

      std::vector<std::string> failures;
      for (auto& indexer : handling) {
        try {
          auto r = indexer->index(std::span<const StorageItem>(&item, 1), parameters);
          if (r.files_indexed == 0) {
            std::string msg = r.errors.empty() ? "not indexed" : r.errors.front().message;
            failures.push_back(fmt::format("{}: {}", indexer->name(), msg));
          }
        } catch (const std::exception& e) {
          failures.push_back(fmt::format("{}: {}", indexer->name(), e.what()));
        }
      }
      if (failures.empty()) {
        report.add_success();
      } else {
        std::string joined = failures.front();
        for (std::size_t k = 1; k < failures.size(); ++k) joined += "; " + failures[k];
        report.add_error(file.str(), std::move(joined));
      }
    }
    return report;
  });
}

Report Dispatcher::dispatch_unindex(const StorageUri& uri) const {
  auto start = std::chrono::steady_clock::now();
  Report report;
  for (auto& indexer : registry_.enabled<IndexerPlugin>(PluginKind::Indexer)) {
    try {
      if (indexer->unindex(uri)) {
        report.add_success();
      } else {
        report.add_error(uri.str(), fmt::format("{}: not indexed", indexer->name()));
      }
    } catch (const std::exception& e) {
      report.add_error(uri.str(), fmt::format("{}: {}", indexer->name(), e.what()));
    }
  }
  report.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

ResultSet Dispatcher::query(std::string_view text, const QueryOptions& options,
                            const std::optional<std::string>& provider) const {
  std::shared_ptr<QueryPlugin> q;
  if (provider) {
    q = std::dynamic_pointer_cast<QueryPlugin>(registry_.find_enabled(*provider));
    if (!q) throw Error(Errc::UnknownPlugin, fmt::format("no enabled query provider \"{}\"", *provider));
  } else {
    auto all = registry_.enabled<QueryPlugin>(PluginKind::QueryProvider);
    if (all.empty()) throw Error(Errc::UnknownPlugin, "no enabled query provider");
    q = all.front();
  }
  return q->query(text, options);
}

PluginContext Dispatcher::context() const {
  return PluginContext{[this](const StorageUri& uri) { return resolve(uri)->at(uri); }};
}

}  // namespace minipacs::plugin
