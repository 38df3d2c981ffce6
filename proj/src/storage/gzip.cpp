// SPDX-License-Identifier: Apache-2.0
#include "minipacs/storage/gzip.hpp"

#include <zlib.h>

#include "minipacs/error.hpp"

namespace minipacs::storage {

namespace {
constexpr int kGzipWindowBits = 15 + 16;
constexpr std::size_t kChunk = 64 * 1024;
}  // namespace

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, kGzipWindowBits, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(Errc::IoFailure, "deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(Errc::IoFailure, "deflate did not finish");
  out.resize(produced);
  return out;
}

std::vector<std::uint8_t> gzip_decompress(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (inflateInit2(&zs, kGzipWindowBits) != Z_OK) throw Error(Errc::Corrupt, "inflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  std::vector<std::uint8_t> out;
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    const auto offset = out.size();
    out.resize(offset + kChunk);
    zs.next_out = out.data() + offset;
    zs.avail_out = static_cast<uInt>(kChunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    out.resize(offset + (kChunk - zs.avail_out));
    if (rc == Z_STREAM_END) break;
    if (rc != Z_OK || (zs.avail_in == 0 && zs.avail_out != 0)) {
      inflateEnd(&zs);
      throw Error(Errc::Corrupt, "gzip payload is damaged or truncated");
    }
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace minipacs::storage
