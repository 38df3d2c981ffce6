// SPDX-License-Identifier: Apache-2.0
#include "minipacs/storage/file_backend.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>

#include <unistd.h>

#include "minipacs/error.hpp"

namespace fs = std::filesystem;

namespace minipacs::storage {

namespace {

constexpr std::string_view kTempMarker = ".tmp-";

fs::path local_path(const StorageUri& uri) {
  if (uri.scheme != "file") throw Error(Errc::NoStorage, "file backend cannot serve '" + uri.str() + "'");
  if (uri.path.empty() || uri.path.front() != '/') throw Error(Errc::BadUri, "file uri must be absolute: " + uri.str());
  return fs::path(uri.path);
}

bool is_temp_file(const fs::path& p) { return p.filename().string().find(kTempMarker) != std::string::npos; }

void walk(const fs::path& dir, std::vector<StorageUri>& out) {
  std::vector<fs::directory_entry> entries;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) entries.push_back(*it);
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.path().filename().string() < b.path().filename().string(); });
  for (const auto& entry : entries) {
    if (entry.is_directory(ec)) {
      walk(entry.path(), out);
    } else if (entry.is_regular_file(ec) && !is_temp_file(entry.path())) {
      out.push_back(StorageUri::from_path(entry.path()));
    }
  }
}

}  // namespace

FileBackend::FileBackend(fs::path root) : root_(fs::absolute(std::move(root)).lexically_normal()) {}

StorageUri FileBackend::put(const std::string& relative_path, ByteBuffer bytes) {
  static std::atomic<unsigned long> counter{0};
  const fs::path target = root_ / relative_path;
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + target.parent_path().string() + ": " + ec.message());

  auto temp = target;
  temp += std::string(kTempMarker) + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      fs::remove(temp, ec);
      throw Error(Errc::IoFailure, "cannot write " + temp.string());
    }
  }
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw Error(Errc::IoFailure, "cannot rename into " + target.string());
  }
  return StorageUri::from_path(target);
}

ByteBuffer FileBackend::at(const StorageUri& uri) const {
  auto path = local_path(uri);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(Errc::NotFound, "no stored object at " + uri.str());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  ByteBuffer data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::IoFailure, "cannot read " + path.string());
  return data;
}

bool FileBackend::remove(const StorageUri& uri) {
  auto path = local_path(uri);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return false;
  return fs::remove(path, ec);
}

std::vector<StorageUri> FileBackend::list(const StorageUri& prefix) const {
  auto path = local_path(prefix);
  std::vector<StorageUri> out;
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) {
    out.push_back(StorageUri::from_path(path));
  } else if (fs::is_directory(path, ec)) {
    walk(path, out);
  }
  return out;
}

}  // namespace minipacs::storage
