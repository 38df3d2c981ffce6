// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace minipacs::storage {

/// Deflate inside gzip framing.
std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> data);

/// Throws Error(Corrupt) on a damaged or truncated stream.
std::vector<std::uint8_t> gzip_decompress(std::span<const std::uint8_t> data);

}  // namespace minipacs::storage
