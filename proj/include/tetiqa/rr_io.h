#ifndef TETIQA_RR_IO_H_
#define TETIQA_RR_IO_H_

// Reduced-reference feature file.
//
// A JSON document:
//
//   {
//     "format_version": 1,
//     "source_id": "lena.pgm",
//     "dims": {"width": 512, "height": 512},
//     "levels": 2,
//     "subbands": [
//       {"scale": 1, "orientation": 1,
//        "cov": [45 reals, upper triangle of the 9x9 covariance, row-major],
//        "k": 1.27, "lambda": 0.98, "dropped_zero_fraction": 0},
//       ...
//     ]
//   }
//
// Reals are written with 17 significant digits so that a write/read cycle
// is bit-exact.

#include <filesystem>
#include <string>
#include <string_view>

#include "tetiqa/gsm.h"

namespace tetiqa {

inline constexpr int kUpperTriangleSize =
    kNeighborhoodSize * (kNeighborhoodSize + 1) / 2;

std::string SerializeRR(const RRFeatureSet& features);

// Throws InvalidInput on malformed documents, version mismatch, missing or
// misordered subbands and covariances that are not positive definite.
RRFeatureSet ParseRR(std::string_view text);

void WriteRR(const RRFeatureSet& features, const std::filesystem::path& path);
RRFeatureSet ReadRR(const std::filesystem::path& path);

}  // namespace tetiqa

#endif  // TETIQA_RR_IO_H_
