#ifndef STYLECODEC_MANIFEST_HPP_
#define STYLECODEC_MANIFEST_HPP_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stylecodec {

/// Addresses one cell of the content x style grid. A missing style means the
/// original (unstylized) image.
struct GridKey {
  int content = 0;
  std::optional<int> style;

  auto operator<=>(const GridKey&) const = default;
};

/// Index of a forged dataset: the full grid of (content, style) images plus
/// one original per content.
struct DatasetManifest {
  int schema_version = 1;
  int image_size = 0;
  long long forge_seed = 0;
  std::vector<int> content_ids;
  std::vector<int> style_ids;  // excludes the "original" pseudo-style
  std::map<GridKey, std::string> entries;  // key -> path relative to the manifest dir

  const std::string& path_for(const GridKey& key) const;
};

/// Expected entry count of a complete grid: one cell per (content, style)
/// pair plus one original per content.
long long grid_entry_count(long long n_contents, long long n_styles);

/// Structural validation: complete grid, no stray entries. Throws
/// ValidationError.
void validate_manifest(const DatasetManifest& m);

/// Structural validation plus file checks: every referenced image exists,
/// decodes, and is a valid image of `image_size`. `root` is the manifest
/// directory.
void validate_manifest_files(const DatasetManifest& m, const std::string& root);

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& m, const std::string& path);

}  // namespace stylecodec

#endif  // STYLECODEC_MANIFEST_HPP_
