#ifndef TETIQA_GSM_H_
#define TETIQA_GSM_H_

// Gaussian Scale Mixture features of tetrolet subbands.
//
// A 3x3 neighborhood Y of subband coefficients is modelled as Y = x * U with
// U ~ N(0, M) and a positive multiplier x. Per subband we keep the
// covariance M of the neighborhoods, and a Weibull(k, lambda) fit to the
// per-neighborhood maximum-likelihood multipliers sqrt(Y^T M^-1 Y / 9).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tetiqa/image.h"
#include "tetiqa/tetrolet.h"

namespace tetiqa {

inline constexpr int kNeighborhoodSize = 9;
inline constexpr double kDefaultEpsilonReg = 1e-6;
inline constexpr std::size_t kMinWeibullSamples = 30;

using Vector9 = Eigen::Matrix<double, kNeighborhoodSize, 1>;
using Matrix9 = Eigen::Matrix<double, kNeighborhoodSize, kNeighborhoodSize>;

struct NeighborhoodVector {
  Vector9 y;
  std::size_t row = 0;  // center position in the subband
  std::size_t col = 0;
};

struct WeibullParams {
  double shape = 1.0;  // k
  double scale = 1.0;  // lambda

  bool operator==(const WeibullParams&) const = default;
};

struct SubbandFeatures {
  int scale = 1;        // 1-based decomposition level
  int orientation = 1;  // 1..3
  Matrix9 cov = Matrix9::Identity();
  WeibullParams weibull;
  double dropped_zero_fraction = 0.0;
};

inline constexpr int kRRFormatVersion = 1;

struct RRFeatureSet {
  int format_version = kRRFormatVersion;
  std::string source_id;
  std::size_t width = 0;  // image dimensions after cropping
  std::size_t height = 0;
  int levels = 2;
  std::vector<SubbandFeatures> subbands;  // (scale asc, orientation asc)
};

// One vector per valid 3x3 window, windows visited row-major, each window
// flattened row-major. Throws InvalidInput for subbands smaller than 3x3.
std::vector<NeighborhoodVector> ExtractNeighborhoods(const ImagePlane& subband);

// Sample covariance (mean removed, divisor n - 1) plus
// epsilon * (trace / 9) * I, with 1e-12 * I when the trace is zero.
Matrix9 EstimateCovariance(std::span<const NeighborhoodVector> vectors,
                           double epsilon = kDefaultEpsilonReg);

// sqrt(y^T M^-1 y / 9) via a Cholesky solve. Throws InvalidInput when M is
// not positive definite.
double EstimateMultiplier(const Vector9& y, const Matrix9& m);

// Multipliers for every vector, sharing one factorization of M.
std::vector<double> EstimateMultipliers(
    std::span<const NeighborhoodVector> vectors, const Matrix9& m);

// Maximum-likelihood Weibull fit by Newton iteration on the profile
// likelihood equation in k. Requires at least 30 strictly positive samples
// that are not all equal (DegenerateData otherwise); throws ConvergenceError
// if |dk| < 1e-8 is not reached within 200 iterations.
WeibullParams FitWeibull(std::span<const double> samples);

struct GsmOptions {
  double epsilon_reg = kDefaultEpsilonReg;
};

SubbandFeatures ExtractSubbandFeatures(const ImagePlane& subband, int scale,
                                       int orientation,
                                       const GsmOptions& options = {});

// Features of every detail subband in (scale, orientation) order. Failures
// are rethrown with the subband identity prepended.
RRFeatureSet ExtractFeatures(const TetroletDecomposition& decomposition,
                             const GsmOptions& options = {});

}  // namespace tetiqa

#endif  // TETIQA_GSM_H_
