// SPDX-License-Identifier: Apache-2.0
// Small instrumented plugins for exercising the framework.
#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <set>

#include "minipacs/plugin/plugin.hpp"

namespace minipacs::testing {

class StaticSet final : public plugin::PluginSet {
 public:
  StaticSet(std::string name, std::vector<std::shared_ptr<plugin::Plugin>> plugins)
      : name_(std::move(name)), plugins_(std::move(plugins)) {}
  std::string name() const override { return name_; }
  std::vector<std::shared_ptr<plugin::Plugin>> plugins() const override { return plugins_; }

 private:
  std::string name_;
  std::vector<std::shared_ptr<plugin::Plugin>> plugins_;
};

class BackendStorage final : public plugin::StoragePlugin {
 public:
  BackendStorage(std::string name, std::shared_ptr<storage::StorageBackend> backend)
      : name_(std::move(name)), backend_(std::move(backend)) {}
  std::string name() const override { return name_; }
  std::string scheme() const override { return backend_->scheme(); }
  std::shared_ptr<storage::StorageBackend> backend() override { return backend_; }

 private:
  std::string name_;
  std::shared_ptr<storage::StorageBackend> backend_;
};

/// A one-shot latch that index() blocks on until opened.
class Gate {
 public:
  void open() {
    std::lock_guard lock(m_);
    open_ = true;
    cv_.notify_all();
  }
  void wait() {
    std::unique_lock lock(m_);
    cv_.wait(lock, [&] { return open_; });
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  bool open_ = false;
};

/// Records every uri passed to index() and keeps an in-memory set of
/// indexed uris.
class CountingIndexer final : public plugin::IndexerPlugin {
 public:
  using Predicate = std::function<bool(const storage::StorageUri&)>;

  explicit CountingIndexer(std::string name, Predicate handles = [](auto&) { return true; })
      : name_(std::move(name)), handles_(std::move(handles)) {}

  std::string name() const override { return name_; }
  bool handles(const storage::StorageUri& uri) const override { return handles_(uri); }

  plugin::Report index(std::span<const plugin::StorageItem> items, const plugin::Parameters& params) override {
    if (gate_) gate_->wait();
    plugin::Report r;
    std::lock_guard lock(m_);
    last_params_ = params;
    for (auto& item : items) {
      seen_.push_back(item.uri.str());
      if (fail_) {
        r.add_error(item.uri.str(), "refused");
      } else {
        indexed_.insert(item.uri.str());
        r.add_success();
      }
    }
    return r;
  }

  bool unindex(const storage::StorageUri& uri) override {
    std::lock_guard lock(m_);
    ++unindex_calls_;
    return indexed_.erase(uri.str()) > 0;
  }

  void set_gate(std::shared_ptr<Gate> gate) { gate_ = std::move(gate); }
  void set_fail(bool fail) { fail_ = fail; }

  std::vector<std::string> seen() const {
    std::lock_guard lock(m_);
    return seen_;
  }
  std::size_t unindex_calls() const {
    std::lock_guard lock(m_);
    return unindex_calls_;
  }
  plugin::Parameters last_params() const {
    std::lock_guard lock(m_);
    return last_params_;
  }

 private:
  std::string name_;
  Predicate handles_;
  std::shared_ptr<Gate> gate_;
  std::atomic<bool> fail_{false};
  mutable std::mutex m_;
  std::vector<std::string> seen_;
  std::set<std::string> indexed_;
  std::size_t unindex_calls_ = 0;
  plugin::Parameters last_params_;
};

class FixedQuery final : public plugin::QueryPlugin {
 public:
  FixedQuery(std::string name, std::vector<std::string> uris) : name_(std::move(name)), uris_(std::move(uris)) {}
  std::string name() const override { return name_; }
  plugin::ResultSet query(std::string_view, const plugin::QueryOptions&) override {
    ++calls;
    plugin::ResultSet rs;
    for (auto& u : uris_) rs.hits.push_back({u, 1.0, {}});
    rs.total = rs.hits.size();
    return rs;
  }
  std::atomic<int> calls{0};

 private:
  std::string name_;
  std::vector<std::string> uris_;
};

}  // namespace minipacs::testing
