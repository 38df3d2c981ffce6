// SPDX-License-Identifier: Apache-2.0
#include "minipacs/storage/uri.hpp"

#include <algorithm>

#include "minipacs/error.hpp"

namespace minipacs::storage {

namespace {

bool valid_scheme(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
  });
}

std::vector<std::string_view> split_segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto slash = path.find('/', start);
    auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > start) out.push_back(path.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return out;
}

}  // namespace

StorageUri StorageUri::parse(std::string_view text) {
  auto sep = text.find("://");
  if (sep == std::string_view::npos) throw Error(Errc::BadUri, "missing '://' in '" + std::string(text) + "'");
  auto scheme = text.substr(0, sep);
  if (!valid_scheme(scheme)) throw Error(Errc::BadUri, "invalid scheme in '" + std::string(text) + "'");
  auto path = text.substr(sep + 3);
  for (auto seg : split_segments(path)) {
    if (seg == "..") throw Error(Errc::BadUri, "'..' segment in '" + std::string(text) + "'");
  }
  if (path.find('\0') != std::string_view::npos) throw Error(Errc::BadUri, "NUL in uri");
  return StorageUri{std::string(scheme), std::string(path)};
}

StorageUri StorageUri::from_path(const std::filesystem::path& path) {
  return StorageUri{"file", std::filesystem::absolute(path).lexically_normal().generic_string()};
}

std::vector<std::string> StorageUri::segments() const {
  std::vector<std::string> out;
  for (auto s : split_segments(path)) out.emplace_back(s);
  return out;
}

std::string StorageUri::filename() const {
  auto segs = split_segments(path);
  return segs.empty() ? std::string{} : std::string(segs.back());
}

bool StorageUri::has_suffix(std::string_view suffix) const {
  return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool path_order_less(std::string_view a, std::string_view b) {
  auto sa = split_segments(a);
  auto sb = split_segments(b);
  return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
}

}  // namespace minipacs::storage
