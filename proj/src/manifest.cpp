#include "stylecodec/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stylecodec/errors.hpp"
#include "stylecodec/image.hpp"

namespace stylecodec {

using nlohmann::json;

const std::string& DatasetManifest::path_for(const GridKey& key) const {
  auto it = entries.find(key);
  if (it == entries.end())
    throw ValidationError("manifest has no entry for content " + std::to_string(key.content) +
                          ", style " + (key.style ? std::to_string(*key.style) : "<original>"));
  return it->second;
}

long long grid_entry_count(long long n_contents, long long n_styles) {
  return n_contents * n_styles + n_contents;
}

void validate_manifest(const DatasetManifest& m) {
  if (m.schema_version != 1)
    throw SchemaError("unsupported manifest schema_version " + std::to_string(m.schema_version));
  if (m.image_size <= 0 || m.image_size % 8 != 0)
    throw ValidationError("manifest image_size must be a positive multiple of 8");
  for (int c : m.content_ids) {
    if (m.entries.find({c, std::nullopt}) == m.entries.end())
      throw ValidationError("manifest incomplete: missing original for content " + std::to_string(c));
    for (int s : m.style_ids)
      if (m.entries.find({c, s}) == m.entries.end())
        throw ValidationError("manifest incomplete: missing cell (content " + std::to_string(c) +
                              ", style " + std::to_string(s) + ")");
  }
  auto expected = grid_entry_count(static_cast<long long>(m.content_ids.size()),
                                   static_cast<long long>(m.style_ids.size()));
  if (static_cast<long long>(m.entries.size()) != expected)
    throw ValidationError("manifest has " + std::to_string(m.entries.size()) + " entries, expected " +
                          std::to_string(expected));
}

void validate_manifest_files(const DatasetManifest& m, const std::string& root) {
  validate_manifest(m);
  for (const auto& [key, rel] : m.entries) {
    Tensor img = load_image(root + "/" + rel);
    if (img.h != m.image_size || img.w != m.image_size)
      throw ValidationError("image size mismatch in " + rel);
    validate_image(img);
  }
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    m.image_size = j.at("image_size").get<int>();
    m.forge_seed = j.at("forge_seed").get<long long>();
    m.content_ids = j.at("content_ids").get<std::vector<int>>();
    m.style_ids = j.at("style_ids").get<std::vector<int>>();
    for (const auto& e : j.at("entries")) {
      GridKey key;
      key.content = e.at("content").get<int>();
      if (!e.at("style").is_null()) key.style = e.at("style").get<int>();
      m.entries[key] = e.at("path").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  validate_manifest(m);
  return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
  json entries = json::array();
  for (const auto& [key, rel] : m.entries) {
    json e;
    e["content"] = key.content;
    if (key.style)
      e["style"] = *key.style;
    else
      e["style"] = nullptr;
    e["path"] = rel;
    entries.push_back(e);
  }
  json j;
  j["schema_version"] = m.schema_version;
  j["image_size"] = m.image_size;
  j["forge_seed"] = m.forge_seed;
  j["content_ids"] = m.content_ids;
  j["style_ids"] = m.style_ids;
  j["entries"] = entries;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(1) << "\n";
}

}  // namespace stylecodec
