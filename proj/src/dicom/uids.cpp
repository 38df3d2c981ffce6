// SPDX-License-Identifier: Apache-2.0
#include "minipacs/dicom/uids.hpp"

#include <algorithm>
#include <random>

namespace minipacs::dicom::uids {

bool is_supported_transfer_syntax(std::string_view uid) noexcept {
  return uid == kImplicitVrLittleEndian || uid == kExplicitVrLittleEndian;
}

bool is_storage_sop_class(std::string_view uid) noexcept {
  return uid.size() > kStoragePrefix.size() && uid.substr(0, kStoragePrefix.size()) == kStoragePrefix;
}

bool is_valid_uid(std::string_view uid) noexcept {
  if (uid.empty() || uid.size() > 64) return false;
  std::size_t start = 0;
  while (true) {
    auto dot = uid.find('.', start);
    auto part = uid.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (part.empty() || (part.size() > 1 && part[0] == '0')) return false;
    if (!std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

std::string generate_uid() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  unsigned __int128 v = (static_cast<unsigned __int128>(rng()) << 64) | rng();
  std::string digits;
  do {
    digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  } while (v != 0);
  std::reverse(digits.begin(), digits.end());
  return "2.25." + digits;
}

}  // namespace minipacs::dicom::uids
