// SPDX-License-Identifier: Apache-2.0
#include "minipacs/http/webui_plugins.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <json.hpp>

#include "minipacs/error.hpp"

namespace minipacs::http {

namespace fs = std::filesystem;

bool valid_slot_id(std::string_view slot) noexcept {
  return std::find(std::begin(kSlotIds), std::end(kSlotIds), slot) != std::end(kSlotIds);
}

namespace {

std::optional<std::string> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool safe_relative(std::string_view rel) {
  if (rel.empty() || rel.front() == '/') return false;
  std::size_t start = 0;
  while (start <= rel.size()) {
    auto end = rel.find('/', start);
    if (end == std::string_view::npos) end = rel.size();
    auto seg = rel.substr(start, end - start);
    if (seg.empty() || seg == "." || seg == ".." || seg.find('\\') != std::string_view::npos) return false;
    start = end + 1;
  }
  return true;
}

}  // namespace

std::shared_ptr<WebUiPackage> WebUiPackage::load(const fs::path& directory) {
  auto text = slurp(directory / "package.json");
  if (!text) throw Error(Errc::Malformed, fmt::format("{}: no package.json", directory.string()));
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(*text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::Malformed, fmt::format("{}: package.json: {}", directory.string(), e.what()));
  }
  plugin::WebUiDescriptor d;
  auto field = [&](const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string() || it->get<std::string>().empty())
      throw Error(Errc::Malformed, fmt::format("{}: package.json needs a string \"{}\"", directory.string(), key));
    return it->get<std::string>();
  };
  if (!doc.is_object()) throw Error(Errc::Malformed, fmt::format("{}: package.json is not an object", directory.string()));
  d.name = field("name");
  d.slot_id = field("slot-id");
  d.caption = field("caption");
  d.module_file = field("module-file");
  if (!valid_slot_id(d.slot_id))
    throw Error(Errc::Malformed, fmt::format("{}: unknown slot-id \"{}\"", directory.string(), d.slot_id));
  if (!safe_relative(d.module_file) || !fs::is_regular_file(directory / d.module_file))
    throw Error(Errc::Malformed, fmt::format("{}: module file \"{}\" not found", directory.string(), d.module_file));
  return std::make_shared<WebUiPackage>(directory, std::move(d));
}

std::optional<std::string> WebUiPackage::read_asset(std::string_view relative_path) const {
  if (!safe_relative(relative_path)) return std::nullopt;
  auto path = directory_ / fs::path(std::string(relative_path));
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return std::nullopt;
  return slurp(path);
}

WebUiPluginSet::WebUiPluginSet(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root, ec)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::set<std::string> names;
  for (const auto& dir : dirs) {
    try {
      auto pkg = WebUiPackage::load(dir);
      if (!names.insert(pkg->name()).second) {
        spdlog::warn("webui package {} repeats the name {}; skipped", dir.string(), pkg->name());
        continue;
      }
      plugins_.push_back(std::move(pkg));
    } catch (const Error& e) {
      spdlog::warn("skipping webui package: {}", e.what());
    }
  }
}

}  // namespace minipacs::http
