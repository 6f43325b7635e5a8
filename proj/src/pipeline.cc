#include "tetiqa/pipeline.h"

#include <fstream>
#include <iterator>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "tetiqa/errors.h"
#include "tetiqa/image_io.h"
#include "tetiqa/tetrolet.h"

namespace tetiqa {
namespace {

std::uint64_t HashFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file");
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ull;
  }
  return h;
}

struct CachedReference {
  RRFeatureSet features;
  ImagePlane cropped;
};

}  // namespace

RRFeatureSet ExtractFromPlane(const ImagePlane& image, std::string source_id,
                              const RunConfig& config) {
  const CropResult crop = CropToTransformSize(image, config.levels);
  RRFeatureSet features = ExtractFeatures(Forward(crop.plane, config.levels),
                                          GsmOptions{config.epsilon_reg});
  features.source_id = std::move(source_id);
  features.width = crop.plane.width();
  features.height = crop.plane.height();
  return features;
}

RRFeatureSet ExtractFromFile(const std::filesystem::path& path,
                             const RunConfig& config) {
  return ExtractFromPlane(LoadGrayscale(path), path.filename().string(), config);
}

Measurement MeasurePlane(const ImagePlane& distorted,
                         const RRFeatureSet& reference, const RunConfig& config) {
  if (reference.levels != config.levels) {
    throw InvalidInput(fmt::format(
        "measure: RR features use {} level(s) but {} were requested",
        reference.levels, config.levels));
  }
  const RRFeatureSet features = ExtractFromPlane(distorted, "", config);
  if (features.width != reference.width || features.height != reference.height) {
    throw InvalidInput(fmt::format(
        "measure: distorted image crops to {}x{} but the RR features describe "
        "{}x{}",
        features.width, features.height, reference.width, reference.height));
  }
  Measurement m;
  m.distances = CompareFeatureSets(reference, features);
  m.q = Pool(m.distances, config.d0);
  return m;
}

Measurement MeasureFile(const std::filesystem::path& distorted,
                        const RRFeatureSet& reference, const RunConfig& config) {
  return MeasurePlane(LoadGrayscale(distorted), reference, config);
}

Measurement CompareFiles(const std::filesystem::path& reference,
                         const std::filesystem::path& distorted,
                         const RunConfig& config) {
  return MeasureFile(distorted, ExtractFromFile(reference, config), config);
}

std::vector<EvaluationRecord> BatchResult::Records(bool psnr) const {
  std::vector<EvaluationRecord> out;
  for (const BatchRow& r : rows) {
    if (!r.ok) continue;
    out.push_back(EvaluationRecord{r.row.ref_path.stem().string(),
                                   r.row.distortion_label, psnr ? r.psnr : r.q,
                                   r.row.mos});
  }
  return out;
}

BatchResult ScoreManifest(const std::vector<ManifestRow>& rows,
                          const RunConfig& config, bool with_psnr) {
  BatchResult result;
  std::map<std::uint64_t, std::optional<CachedReference>> cache;
  std::map<std::uint64_t, std::string> cache_errors;

  for (const ManifestRow& row : rows) {
    BatchRow out;
    out.row = row;
    try {
      const std::uint64_t key = HashFile(row.ref_path);
      if (!cache.contains(key)) {
        ++result.reference_extractions;
        try {
          const ImagePlane plane = LoadGrayscale(row.ref_path);
          CachedReference ref;
          ref.features =
              ExtractFromPlane(plane, row.ref_path.filename().string(), config);
          if (with_psnr) ref.cropped = CropToTransformSize(plane, config.levels).plane;
          cache[key] = std::move(ref);
        } catch (const Error& e) {
          cache[key] = std::nullopt;
          cache_errors[key] = e.what();
        }
      }
      const std::optional<CachedReference>& ref = cache[key];
      if (!ref) throw DegenerateData("reference failed: " + cache_errors[key]);

      const ImagePlane distorted = LoadGrayscale(row.dist_path);
      const Measurement m = MeasurePlane(distorted, ref->features, config);
      out.q = m.q;
      if (with_psnr) {
        out.psnr = Psnr(ref->cropped, CropToTransformSize(distorted, config.levels).plane);
      }
      out.ok = true;
    } catch (const Error& e) {
      out.error = fmt::format("line {}: {}", row.line, e.what());
      ++result.failures;
    }
    result.rows.push_back(std::move(out));
  }
  return result;
}

}  // namespace tetiqa
