// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

namespace minipacs::plugin {

struct ReportError {
  std::string uri;
  std::string message;

  bool operator==(const ReportError&) const = default;
};

/// Outcome of an indexing run. files_indexed + errors.size() == files_seen.
struct Report {
  std::size_t files_seen = 0;
  std::size_t files_indexed = 0;
  std::vector<ReportError> errors;
  std::chrono::milliseconds elapsed{0};

  void add_success() {
    ++files_seen;
    ++files_indexed;
  }
  void add_error(std::string uri, std::string message) {
    ++files_seen;
    errors.push_back({std::move(uri), std::move(message)});
  }
  bool consistent() const { return files_indexed <= files_seen && files_indexed + errors.size() == files_seen; }
};

}  // namespace minipacs::plugin
