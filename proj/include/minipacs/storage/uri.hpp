// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace minipacs::storage {

/// Scheme-addressed location such as file:///srv/a/b.dcm or mem://a/b.dcm.
struct StorageUri {
  std::string scheme;
  std::string path;

  /// Throws Error(BadUri) on a missing "://", a scheme that is not a
  /// lowercase token, or any ".." path segment.
  static StorageUri parse(std::string_view text);
  static StorageUri from_path(const std::filesystem::path& path);

  std::string str() const { return scheme + "://" + path; }
  std::vector<std::string> segments() const;
  /// Last path segment.
  std::string filename() const;
  bool has_suffix(std::string_view suffix) const;

  auto operator<=>(const StorageUri&) const = default;
};

/// Depth-first lexicographic order: segment-wise comparison of paths.
bool path_order_less(std::string_view a, std::string_view b);

}  // namespace minipacs::storage
