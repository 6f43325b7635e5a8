#ifndef TETIQA_PIPELINE_H_
#define TETIQA_PIPELINE_H_

// Sender/receiver pipeline: reference image -> RR features, distorted image +
// RR features -> quality score Q, and batch evaluation over a manifest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tetiqa/divergence.h"
#include "tetiqa/eval.h"
#include "tetiqa/gsm.h"
#include "tetiqa/image.h"
#include "tetiqa/manifest.h"

namespace tetiqa {

struct RunConfig {
  int levels = 2;
  double d0 = kDefaultD0;
  double epsilon_reg = kDefaultEpsilonReg;
  FitMode fit_mode = FitMode::kPerGroup;
  // Every stage is deterministic; the seed is only echoed in reports.
  std::uint64_t seed = 0;
};

// Crops, decomposes and extracts features from an in-memory plane.
RRFeatureSet ExtractFromPlane(const ImagePlane& image, std::string source_id,
                              const RunConfig& config);

RRFeatureSet ExtractFromFile(const std::filesystem::path& path,
                             const RunConfig& config);

struct Measurement {
  double q = 0.0;
  std::vector<SubbandDistance> distances;
};

// Crops the distorted plane like the reference was cropped; throws
// InvalidInput if the resulting dimensions or level count differ from the
// RR file.
Measurement MeasurePlane(const ImagePlane& distorted,
                         const RRFeatureSet& reference, const RunConfig& config);

Measurement MeasureFile(const std::filesystem::path& distorted,
                        const RRFeatureSet& reference, const RunConfig& config);

Measurement CompareFiles(const std::filesystem::path& reference,
                         const std::filesystem::path& distorted,
                         const RunConfig& config);

struct BatchRow {
  ManifestRow row;
  bool ok = false;
  std::string error;
  double q = 0.0;
  double psnr = 0.0;
};

struct BatchResult {
  std::vector<BatchRow> rows;  // manifest order
  std::size_t failures = 0;
  std::size_t reference_extractions = 0;  // distinct references processed

  std::vector<EvaluationRecord> Records(bool psnr) const;
};

// Scores every manifest row. Reference features are cached by file content,
// so each distinct reference is extracted once. Row failures are recorded
// and skipped.
BatchResult ScoreManifest(const std::vector<ManifestRow>& rows,
                          const RunConfig& config, bool with_psnr);

}  // namespace tetiqa

#endif  // TETIQA_PIPELINE_H_
