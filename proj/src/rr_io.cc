#include "tetiqa/rr_io.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <Eigen/Cholesky>
#include <fmt/format.h>
#include <json.hpp>

#include "tetiqa/errors.h"

namespace tetiqa {
namespace {

using nlohmann::json;

std::string Real(double v) { return fmt::format("{:.17g}", v); }

[[noreturn]] void Invalid(const std::string& what) {
  throw InvalidInput("rr: " + what);
}

const json& Field(const json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) Invalid(fmt::format("missing field '{}'", key));
  return *it;
}

double RealField(const json& object, const char* key) {
  const json& v = Field(object, key);
  if (!v.is_number()) Invalid(fmt::format("field '{}' is not a number", key));
  return v.get<double>();
}

long long IntField(const json& object, const char* key) {
  const json& v = Field(object, key);
  if (!v.is_number_integer()) {
    Invalid(fmt::format("field '{}' is not an integer", key));
  }
  return v.get<long long>();
}

SubbandFeatures ParseSubband(const json& entry) {
  if (!entry.is_object()) Invalid("subband entry is not an object");
  SubbandFeatures f;
  f.scale = static_cast<int>(IntField(entry, "scale"));
  f.orientation = static_cast<int>(IntField(entry, "orientation"));
  const std::string where =
      fmt::format("subband (scale {}, orientation {})", f.scale, f.orientation);

  const json& cov = Field(entry, "cov");
  if (!cov.is_array() || cov.size() != kUpperTriangleSize) {
    Invalid(fmt::format("{}: cov must hold {} reals", where, kUpperTriangleSize));
  }
  std::size_t k = 0;
  for (int i = 0; i < kNeighborhoodSize; ++i) {
    for (int j = i; j < kNeighborhoodSize; ++j) {
      if (!cov[k].is_number()) Invalid(where + ": cov entry is not a number");
      f.cov(i, j) = f.cov(j, i) = cov[k++].get<double>();
    }
  }
  if (!f.cov.allFinite()) Invalid(where + ": cov is not finite");
  if (Eigen::LLT<Matrix9>(f.cov).info() != Eigen::Success) {
    Invalid(where + ": cov is not positive definite");
  }

  f.weibull.shape = RealField(entry, "k");
  f.weibull.scale = RealField(entry, "lambda");
  if (!(f.weibull.shape > 0.0) || !(f.weibull.scale > 0.0) ||
      !std::isfinite(f.weibull.shape) || !std::isfinite(f.weibull.scale)) {
    Invalid(where + ": Weibull parameters must be finite and positive");
  }
  f.dropped_zero_fraction = RealField(entry, "dropped_zero_fraction");
  if (!(f.dropped_zero_fraction >= 0.0 && f.dropped_zero_fraction <= 1.0)) {
    Invalid(where + ": dropped_zero_fraction outside [0, 1]");
  }
  return f;
}

}  // namespace

std::string SerializeRR(const RRFeatureSet& features) {
  std::string out;
  out += fmt::format("{{\n  \"format_version\": {},\n", features.format_version);
  out += fmt::format("  \"source_id\": {},\n", json(features.source_id).dump());
  out += fmt::format("  \"dims\": {{\"width\": {}, \"height\": {}}},\n",
                     features.width, features.height);
  out += fmt::format("  \"levels\": {},\n", features.levels);
  out += "  \"subbands\": [";
  for (std::size_t s = 0; s < features.subbands.size(); ++s) {
    const SubbandFeatures& f = features.subbands[s];
    out += s ? ",\n    {" : "\n    {";
    out += fmt::format("\"scale\": {}, \"orientation\": {},\n     \"cov\": [",
                       f.scale, f.orientation);
    int k = 0;
    for (int i = 0; i < kNeighborhoodSize; ++i) {
      for (int j = i; j < kNeighborhoodSize; ++j) {
        if (k++) out += ", ";
        out += Real(f.cov(i, j));
      }
    }
    out += fmt::format(
        "],\n     \"k\": {}, \"lambda\": {}, \"dropped_zero_fraction\": {}}}",
        Real(f.weibull.shape), Real(f.weibull.scale),
        Real(f.dropped_zero_fraction));
  }
  out += "\n  ]\n}\n";
  return out;
}

RRFeatureSet ParseRR(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    Invalid(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) Invalid("document is not an object");

  RRFeatureSet out;
  out.format_version = static_cast<int>(IntField(doc, "format_version"));
  if (out.format_version != kRRFormatVersion) {
    Invalid(fmt::format("unsupported format_version {} (expected {})",
                        out.format_version, kRRFormatVersion));
  }
  const json& source = Field(doc, "source_id");
  if (!source.is_string()) Invalid("source_id is not a string");
  out.source_id = source.get<std::string>();

  const json& dims = Field(doc, "dims");
  const long long width = IntField(dims, "width");
  const long long height = IntField(dims, "height");
  if (width <= 0 || height <= 0) Invalid("dims must be positive");
  out.width = static_cast<std::size_t>(width);
  out.height = static_cast<std::size_t>(height);

  const long long levels = IntField(doc, "levels");
  if (levels < 1 || levels > 16) Invalid(fmt::format("invalid levels {}", levels));
  out.levels = static_cast<int>(levels);

  const json& subbands = Field(doc, "subbands");
  if (!subbands.is_array()) Invalid("subbands is not an array");
  std::set<std::pair<int, int>> seen;
  for (const json& entry : subbands) {
    SubbandFeatures f = ParseSubband(entry);
    if (!seen.insert({f.scale, f.orientation}).second) {
      Invalid(fmt::format("duplicate subband (scale {}, orientation {})",
                          f.scale, f.orientation));
    }
    out.subbands.push_back(std::move(f));
  }

  std::size_t expected_pos = 0;
  for (int s = 1; s <= out.levels; ++s) {
    for (int o = 1; o <= kNumOrientations; ++o, ++expected_pos) {
      if (!seen.contains({s, o})) {
        Invalid(fmt::format("missing subband (scale {}, orientation {})", s, o));
      }
      if (expected_pos >= out.subbands.size() ||
          out.subbands[expected_pos].scale != s ||
          out.subbands[expected_pos].orientation != o) {
        Invalid(fmt::format(
            "subband (scale {}, orientation {}) is out of canonical order", s, o));
      }
    }
  }
  if (out.subbands.size() != expected_pos) {
    Invalid(fmt::format("expected {} subbands for {} level(s), found {}",
                        expected_pos, out.levels, out.subbands.size()));
  }
  return out;
}

void WriteRR(const RRFeatureSet& features, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << SerializeRR(features);
  if (!out) throw IoError(path.string() + ": write failed");
}

RRFeatureSet ReadRR(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open RR feature file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseRR(buffer.str());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

}  // namespace tetiqa
