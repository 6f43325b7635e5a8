#ifndef TETIQA_MANIFEST_H_
#define TETIQA_MANIFEST_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tetiqa {

struct ManifestRow {
  std::filesystem::path ref_path;
  std::filesystem::path dist_path;
  double mos = 0.0;
  std::string distortion_label;  // FLT, NOZ, JPG, JP2, DCQ, BLR, ...
  int line = 0;                  // 1-based line in the source file
};

// CSV with the header ref_path,dist_path,mos,distortion_label (columns may
// appear in any order; extra columns are ignored). Fields are trimmed, blank
// lines and lines starting with '#' are skipped. Relative paths are resolved
// against `base_dir`. Throws InvalidInput carrying the line number.
std::vector<ManifestRow> ParseManifestText(std::string_view text,
                                           const std::filesystem::path& base_dir);

// Reads `path` and resolves relative paths against its directory.
std::vector<ManifestRow> ParseManifest(const std::filesystem::path& path);

}  // namespace tetiqa

#endif  // TETIQA_MANIFEST_H_
