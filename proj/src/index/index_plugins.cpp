// SPDX-License-Identifier: Apache-2.0
#include "minipacs/index/index_plugins.hpp"

#include <chrono>

#include "minipacs/dicom/codec.hpp"
#include "minipacs/storage/gzip.hpp"

namespace minipacs::index {

namespace {

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && to_lower(s.substr(s.size() - suffix.size())) == suffix;
}

}  // namespace

MetaIndexer::MetaIndexer(std::shared_ptr<InvertedIndex> index, plugin::PluginContext context)
    : index_(std::move(index)), context_(std::move(context)) {}

bool MetaIndexer::handles(const storage::StorageUri& uri) const {
  if (ends_with_ci(uri.path, ".dcm") || ends_with_ci(uri.path, ".dcm.gz")) return true;
  if (uri.filename().find('.') != std::string::npos || !context_.read) return false;
  try {
    auto bytes = context_.read(uri);
    return dicom::has_part10_magic(bytes);
  } catch (const std::exception&) {
    return false;
  }
}

plugin::Report MetaIndexer::index(std::span<const plugin::StorageItem> items, const plugin::Parameters&) {
  auto start = std::chrono::steady_clock::now();
  plugin::Report report;
  for (const auto& item : items) {
    try {
      std::span<const std::uint8_t> bytes = item.bytes;
      storage::ByteBuffer inflated;
      if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
        inflated = storage::gzip_decompress(bytes);
        bytes = inflated;
      }
      index_->index_document(extract_fields(dicom::parse_object(bytes), item.uri));
      report.add_success();
    } catch (const std::exception& e) {
      report.add_error(item.uri.str(), e.what());
    }
  }
  report.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return report;
}

bool MetaIndexer::unindex(const storage::StorageUri& uri) { return index_->unindex(uri.str()); }

plugin::ResultSet MetaQuery::query(std::string_view text, const plugin::QueryOptions& options) {
  return index_->search(parse_query(text), options);
}

IndexPluginSet::IndexPluginSet(plugin::PluginContext context)
    : index_(std::make_shared<InvertedIndex>()),
      indexer_(std::make_shared<MetaIndexer>(index_, std::move(context))),
      query_(std::make_shared<MetaQuery>(index_)) {}

std::vector<std::shared_ptr<plugin::Plugin>> IndexPluginSet::plugins() const { return {indexer_, query_}; }

}  // namespace minipacs::index
