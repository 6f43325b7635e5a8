#include "tetiqa/manifest.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "tetiqa/errors.h"

namespace tetiqa {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> ParseReal(std::string_view s) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::vector<ManifestRow> ParseManifestText(std::string_view text,
                                           const std::filesystem::path& base_dir) {
  static constexpr std::array<std::string_view, 4> kColumns = {
      "ref_path", "dist_path", "mos", "distortion_label"};
  std::array<std::size_t, 4> column{};
  bool have_header = false;
  std::vector<ManifestRow> rows;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                        : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::vector<std::string_view> fields = SplitCsv(line);

    if (!have_header) {
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
        if (it == fields.end()) {
          throw InvalidInput(fmt::format("manifest line {}: missing column '{}'",
                                         line_no, kColumns[c]));
        }
        column[c] = static_cast<std::size_t>(it - fields.begin());
      }
      have_header = true;
      continue;
    }

    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      if (column[c] >= fields.size() || fields[column[c]].empty()) {
        throw InvalidInput(fmt::format("manifest line {}: missing value for '{}'",
                                       line_no, kColumns[c]));
      }
    }
    const std::optional<double> mos = ParseReal(fields[column[2]]);
    if (!mos) {
      throw InvalidInput(fmt::format("manifest line {}: mos '{}' is not a number",
                                     line_no, fields[column[2]]));
    }
    ManifestRow row;
    row.ref_path = std::filesystem::path(fields[column[0]]);
    row.dist_path = std::filesystem::path(fields[column[1]]);
    if (row.ref_path.is_relative()) row.ref_path = base_dir / row.ref_path;
    if (row.dist_path.is_relative()) row.dist_path = base_dir / row.dist_path;
    row.mos = *mos;
    row.distortion_label = std::string(fields[column[3]]);
    row.line = line_no;
    rows.push_back(std::move(row));
  }
  if (!have_header) throw InvalidInput("manifest: missing header line");
  return rows;
}

std::vector<ManifestRow> ParseManifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open manifest");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseManifestText(buffer.str(), path.parent_path());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

}  // namespace tetiqa
