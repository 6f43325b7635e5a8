#ifndef TETIQA_DIVERGENCE_H_
#define TETIQA_DIVERGENCE_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "tetiqa/gsm.h"

namespace tetiqa {

inline constexpr double kDefaultD0 = 0.1;

// KL(Weibull(k1, l1) || Weibull(k2, l2)) in the shape/scale convention:
//   ln(k1 / l1^k1) - ln(k2 / l2^k2) + (k1 - k2)(ln l1 - gamma / k1)
//   + (l1 / l2)^k2 * Gamma(k2 / k1 + 1) - 1
// with gamma the Euler-Mascheroni constant.
double KldWeibull(const WeibullParams& p1, const WeibullParams& p2);

// KL(N(0, M1) || N(0, M2)) = 0.5 [tr(M2^-1 M1) + ln(|M2| / |M1|) - N].
// Uses Cholesky log-determinants and triangular solves.
double KldGaussianZeroMean(const Eigen::Ref<const Eigen::MatrixXd>& m1,
                           const Eigen::Ref<const Eigen::MatrixXd>& m2);

struct SubbandDistance {
  double d = 0.0;
  int scale = 1;
  int orientation = 1;
};

// Weibull part plus Gaussian part; the subbands must share their identity.
SubbandDistance KldJoint(const SubbandFeatures& f1, const SubbandFeatures& f2);

// Per-subband distances between a reference and a distorted feature set.
std::vector<SubbandDistance> CompareFeatureSets(const RRFeatureSet& reference,
                                                const RRFeatureSet& distorted);

// Q = log2(1 + sum(D_i) / d0).
double Pool(std::span<const SubbandDistance> distances, double d0 = kDefaultD0);

}  // namespace tetiqa

#endif  // TETIQA_DIVERGENCE_H_
