// SPDX-License-Identifier: Apache-2.0
#include "minipacs/index/inverted_index.hpp"

#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iterator>
#include <mutex>

#include <fmt/format.h>

#include "minipacs/error.hpp"
#include "minipacs/plugin/config.hpp"

namespace minipacs::index {

namespace {

using DocSet = std::vector<std::uint32_t>;

DocSet intersect(const DocSet& a, const DocSet& b) {
  DocSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

DocSet unite(const DocSet& a, const DocSet& b) {
  DocSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

DocSet subtract(const DocSet& a, const DocSet& b) {
  DocSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void erase_posting(std::map<std::string, std::set<std::uint32_t>, std::less<>>& postings, const std::string& key,
                   std::uint32_t id) {
  auto it = postings.find(key);
  if (it == postings.end()) return;
  it->second.erase(id);
  if (it->second.empty()) postings.erase(it);
}

}  // namespace

void InvertedIndex::add_postings(DocId id, const IndexDocument& doc) {
  for (const auto& [field, values] : doc.fields) {
    for (const auto& v : values) {
      exact_[field][to_lower(v)].insert(id);
      for (auto& t : tokenize(v)) tokens_[t].insert(id);
    }
  }
}

void InvertedIndex::remove_postings(DocId id, const IndexDocument& doc) {
  for (const auto& [field, values] : doc.fields) {
    auto f = exact_.find(field);
    for (const auto& v : values) {
      if (f != exact_.end()) erase_posting(f->second, to_lower(v), id);
      for (auto& t : tokenize(v)) erase_posting(tokens_, t, id);
    }
    if (f != exact_.end() && f->second.empty()) exact_.erase(f);
  }
}

void InvertedIndex::unindex_locked(std::string_view uri) {
  auto it = by_uri_.find(uri);
  if (it == by_uri_.end()) return;
  auto id = it->second;
  remove_postings(id, docs_.at(id));
  docs_.erase(id);
  by_uri_.erase(it);
}

void InvertedIndex::index_document(IndexDocument doc) {
  std::unique_lock lock(mutex_);
  unindex_locked(doc.uri);
  auto id = next_id_++;
  add_postings(id, doc);
  by_uri_.emplace(doc.uri, id);
  docs_.emplace(id, std::move(doc));
}

bool InvertedIndex::unindex(std::string_view uri) {
  std::unique_lock lock(mutex_);
  if (!by_uri_.contains(uri)) return false;
  unindex_locked(uri);
  return true;
}

InvertedIndex::DocSet InvertedIndex::universe() const {
  DocSet out;
  out.reserve(docs_.size());
  for (auto& [id, _] : docs_) out.push_back(id);
  return out;
}

InvertedIndex::DocSet InvertedIndex::match_in(const Postings& postings, std::string_view pattern) {
  DocSet out;
  if (!has_wildcards(pattern)) {
    auto it = postings.find(pattern);
    if (it != postings.end()) out.assign(it->second.begin(), it->second.end());
    return out;
  }
  auto prefix = pattern.substr(0, pattern.find_first_of("*?"));
  std::set<DocId> acc;
  for (auto it = postings.lower_bound(prefix); it != postings.end() && it->first.starts_with(prefix); ++it) {
    if (wildcard_match(pattern, it->first)) acc.insert(it->second.begin(), it->second.end());
  }
  out.assign(acc.begin(), acc.end());
  return out;
}

InvertedIndex::DocSet InvertedIndex::match_term(const QueryNode& term) const {
  auto pattern = to_lower(term.pattern);
  if (!term.field) return match_in(tokens_, pattern);
  auto f = exact_.find(*term.field);
  if (f == exact_.end()) return {};
  return match_in(f->second, pattern);
}

InvertedIndex::DocSet InvertedIndex::evaluate(const QueryNode& node) const {
  using K = QueryNode::Kind;
  switch (node.kind) {
    case K::MatchAll: return universe();
    case K::Term: return match_term(node);
    case K::Not: return subtract(universe(), evaluate(node.children.front()));
    case K::And: {
      // Positive children first, then subtract negated ones.
      std::optional<DocSet> acc;
      std::vector<const QueryNode*> negated;
      for (auto& c : node.children) {
        if (c.kind == K::Not) {
          negated.push_back(&c.children.front());
          continue;
        }
        acc = acc ? intersect(*acc, evaluate(c)) : evaluate(c);
        if (acc->empty()) return {};
      }
      if (!acc) acc = universe();
      for (auto* n : negated) acc = subtract(*acc, evaluate(*n));
      return *acc;
    }
    case K::Or: {
      DocSet acc;
      for (auto& c : node.children) acc = unite(acc, evaluate(c));
      return acc;
    }
  }
  return {};
}

plugin::ResultSet InvertedIndex::search(const QueryNode& query, const plugin::QueryOptions& options) const {
  auto start = std::chrono::steady_clock::now();
  std::shared_lock lock(mutex_);
  auto matched = evaluate(query);

  std::vector<std::pair<DocSet, QueryNode>> term_sets;
  for (auto& t : positive_terms(query)) term_sets.emplace_back(match_term(t), t);

  plugin::ResultSet rs;
  rs.total = matched.size();
  std::vector<std::pair<double, const IndexDocument*>> ranked;
  ranked.reserve(matched.size());
  for (auto id : matched) {
    double score = 0;
    for (auto& [set, _] : term_sets) {
      if (std::binary_search(set.begin(), set.end(), id)) score += 1;
    }
    ranked.emplace_back(score, &docs_.at(id));
  }
  std::sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->uri < b.second->uri;
  });
  if (options.max_hits && ranked.size() > options.max_hits) ranked.resize(options.max_hits);

  for (auto& [score, doc] : ranked) {
    plugin::SearchHit hit{doc->uri, score, {}};
    if (options.fields_filter.empty()) {
      hit.fields = doc->fields;
    } else {
      for (auto& f : options.fields_filter) {
        if (auto it = doc->fields.find(f); it != doc->fields.end()) hit.fields.emplace(f, it->second);
      }
    }
    rs.hits.push_back(std::move(hit));
  }
  rs.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return rs;
}

std::size_t InvertedIndex::size() const {
  std::shared_lock lock(mutex_);
  return docs_.size();
}

std::size_t InvertedIndex::vocabulary_size() const {
  std::shared_lock lock(mutex_);
  std::size_t n = tokens_.size();
  for (auto& [_, p] : exact_) n += p.size();
  return n;
}

bool InvertedIndex::contains(std::string_view uri) const {
  std::shared_lock lock(mutex_);
  return by_uri_.contains(uri);
}

std::optional<IndexDocument> InvertedIndex::document(std::string_view uri) const {
  std::shared_lock lock(mutex_);
  auto it = by_uri_.find(uri);
  if (it == by_uri_.end()) return std::nullopt;
  return docs_.at(it->second);
}

std::vector<IndexDocument> InvertedIndex::documents() const {
  std::shared_lock lock(mutex_);
  std::vector<IndexDocument> out;
  for (auto& [_, id] : by_uri_) out.push_back(docs_.at(id));
  return out;
}

void InvertedIndex::clear() {
  std::unique_lock lock(mutex_);
  docs_.clear();
  by_uri_.clear();
  exact_.clear();
  tokens_.clear();
}

bool InvertedIndex::consistent() const {
  std::shared_lock lock(mutex_);
  if (docs_.size() != by_uri_.size()) return false;
  for (auto& [uri, id] : by_uri_) {
    auto it = docs_.find(id);
    if (it == docs_.end() || it->second.uri != uri) return false;
  }
  auto live = [&](const Postings& p) {
    for (auto& [_, ids] : p) {
      if (ids.empty()) return false;
      for (auto id : ids) {
        if (!docs_.contains(id)) return false;
      }
    }
    return true;
  };
  if (!live(tokens_)) return false;
  for (auto& [_, p] : exact_) {
    if (p.empty() || !live(p)) return false;
  }
  return true;
}

// Snapshot layout: "MPIX" | version u8 | payload length u64 | payload |
// crc32(payload) u32, all little endian. The payload lists documents only;
// postings are rebuilt on load.

namespace {

constexpr std::uint8_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_str(std::vector<std::uint8_t>& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> b) : b_(b) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string str() {
    auto n = uint(4);
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == b_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > b_.size() - pos_) throw Error(Errc::Corrupt, "index snapshot truncated");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(std::span<const std::uint8_t> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < data.size()) {
    auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - off, 1u << 30));
    crc = crc32(crc, data.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> InvertedIndex::serialize() const {
  std::vector<std::uint8_t> payload;
  {
    std::shared_lock lock(mutex_);
    put_u32(payload, static_cast<std::uint32_t>(by_uri_.size()));
    for (auto& [uri, id] : by_uri_) {
      const auto& d = docs_.at(id);
      put_str(payload, d.uri);
      put_str(payload, d.study_uid);
      put_str(payload, d.series_uid);
      put_str(payload, d.sop_uid);
      payload.push_back(d.patient_id ? 1 : 0);
      if (d.patient_id) put_str(payload, *d.patient_id);
      put_u32(payload, static_cast<std::uint32_t>(d.fields.size()));
      for (auto& [field, values] : d.fields) {
        put_str(payload, field);
        put_u32(payload, static_cast<std::uint32_t>(values.size()));
        for (auto& v : values) put_str(payload, v);
      }
    }
  }
  std::vector<std::uint8_t> out{'M', 'P', 'I', 'X', kVersion};
  put_u64(out, payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
  put_u32(out, checksum(payload));
  return out;
}

void InvertedIndex::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 17 || !std::equal(bytes.begin(), bytes.begin() + 4, "MPIX"))
    throw Error(Errc::Corrupt, "not an index snapshot");
  if (bytes[4] != kVersion) throw Error(Errc::Corrupt, fmt::format("unsupported snapshot version {}", bytes[4]));
  Cursor head(bytes.subspan(5, 8));
  auto len = head.uint(8);
  if (len != bytes.size() - 17) throw Error(Errc::Corrupt, "index snapshot length mismatch");
  auto payload = bytes.subspan(13, len);
  Cursor tail(bytes.subspan(13 + len));
  if (tail.uint(4) != checksum(payload)) throw Error(Errc::Corrupt, "index snapshot checksum mismatch");

  std::vector<IndexDocument> docs;
  Cursor counted(payload);
  auto count = counted.uint(4);
  for (std::uint64_t i = 0; i < count; ++i) {
    IndexDocument d;
    d.uri = counted.str();
    d.study_uid = counted.str();
    d.series_uid = counted.str();
    d.sop_uid = counted.str();
    if (counted.uint(1)) d.patient_id = counted.str();
    auto nfields = counted.uint(4);
    for (std::uint64_t f = 0; f < nfields; ++f) {
      auto name = counted.str();
      auto nvalues = counted.uint(4);
      std::vector<std::string> values;
      for (std::uint64_t v = 0; v < nvalues; ++v) values.push_back(counted.str());
      d.fields.emplace(std::move(name), std::move(values));
    }
    docs.push_back(std::move(d));
  }
  if (!counted.at_end()) throw Error(Errc::Corrupt, "trailing bytes in index snapshot");

  std::unique_lock lock(mutex_);
  docs_.clear();
  by_uri_.clear();
  exact_.clear();
  tokens_.clear();
  for (auto& d : docs) {
    auto id = next_id_++;
    add_postings(id, d);
    by_uri_.emplace(d.uri, id);
    docs_.emplace(id, std::move(d));
  }
}

void InvertedIndex::flush(const std::filesystem::path& path) const {
  auto bytes = serialize();
  plugin::write_file_atomically(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void InvertedIndex::load(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    clear();
    return;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, fmt::format("cannot read {}", path.string()));
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  deserialize(bytes);
}

}  // namespace minipacs::index
