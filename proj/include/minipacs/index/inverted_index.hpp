// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "minipacs/index/document.hpp"
#include "minipacs/index/query.hpp"
#include "minipacs/plugin/plugin.hpp"

namespace minipacs::index {

/// Field/value inverted index over IndexDocuments.
///
/// Each value gets one exact posting (whole value, lowercased) under its
/// field, plus free-text postings for its tokens. Searches take a shared
/// lock; index/unindex take it exclusively, so a re-index is never seen half
/// applied.
class InvertedIndex {
 public:
  /// Replaces any document already stored under the same uri.
  void index_document(IndexDocument doc);
  bool unindex(std::string_view uri);

  plugin::ResultSet search(const QueryNode& query, const plugin::QueryOptions& options = {}) const;

  std::size_t size() const;
  /// Distinct (field, value) plus distinct free-text tokens.
  std::size_t vocabulary_size() const;
  bool contains(std::string_view uri) const;
  std::optional<IndexDocument> document(std::string_view uri) const;
  /// All documents, ordered by uri.
  std::vector<IndexDocument> documents() const;
  void clear();

  /// True when every posting references a live document and the uri map
  /// and document table agree.
  bool consistent() const;

  /// Snapshot to `path` through a temp file and rename. Throws
  /// Error(IoFailure).
  void flush(const std::filesystem::path& path) const;
  /// Replaces the contents with the snapshot at `path`; a missing file
  /// yields an empty index. Throws Error(Corrupt).
  void load(const std::filesystem::path& path);

  std::vector<std::uint8_t> serialize() const;
  void deserialize(std::span<const std::uint8_t> bytes);

 private:
  using DocId = std::uint32_t;
  using Postings = std::map<std::string, std::set<DocId>, std::less<>>;
  using DocSet = std::vector<DocId>;

  void add_postings(DocId id, const IndexDocument& doc);
  void remove_postings(DocId id, const IndexDocument& doc);
  void unindex_locked(std::string_view uri);
  DocSet evaluate(const QueryNode& node) const;
  DocSet match_term(const QueryNode& term) const;
  static DocSet match_in(const Postings& postings, std::string_view pattern);
  DocSet universe() const;

  mutable std::shared_mutex mutex_;
  DocId next_id_ = 1;
  std::map<DocId, IndexDocument> docs_;
  std::map<std::string, DocId, std::less<>> by_uri_;
  std::map<std::string, Postings, std::less<>> exact_;
  Postings tokens_;
};

}  // namespace minipacs::index
