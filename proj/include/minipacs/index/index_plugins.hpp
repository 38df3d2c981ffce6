// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "minipacs/index/inverted_index.hpp"
#include "minipacs/plugin/plugin.hpp"

namespace minipacs::index {

/// "meta-index": accepts names ending in .dcm or .dcm.gz (any case), and
/// extensionless items whose bytes carry the Part-10 magic.
class MetaIndexer final : public plugin::IndexerPlugin {
 public:
  MetaIndexer(std::shared_ptr<InvertedIndex> index, plugin::PluginContext context);

  std::string name() const override { return "meta-index"; }
  bool handles(const storage::StorageUri& uri) const override;
  plugin::Report index(std::span<const plugin::StorageItem> items, const plugin::Parameters& parameters) override;
  bool unindex(const storage::StorageUri& uri) override;

 private:
  std::shared_ptr<InvertedIndex> index_;
  plugin::PluginContext context_;
};

/// "meta-query": the query language of parse_query over the shared index.
class MetaQuery final : public plugin::QueryPlugin {
 public:
  explicit MetaQuery(std::shared_ptr<InvertedIndex> index) : index_(std::move(index)) {}

  std::string name() const override { return "meta-query"; }
  plugin::ResultSet query(std::string_view text, const plugin::QueryOptions& options) override;

 private:
  std::shared_ptr<InvertedIndex> index_;
};

/// Set "index": the indexer and query provider sharing one InvertedIndex.
class IndexPluginSet final : public plugin::PluginSet {
 public:
  explicit IndexPluginSet(plugin::PluginContext context);

  std::string name() const override { return "index"; }
  std::vector<std::shared_ptr<plugin::Plugin>> plugins() const override;

  const std::shared_ptr<InvertedIndex>& inverted_index() const noexcept { return index_; }

 private:
  std::shared_ptr<InvertedIndex> index_;
  std::shared_ptr<MetaIndexer> indexer_;
  std::shared_ptr<MetaQuery> query_;
};

}  // namespace minipacs::index
