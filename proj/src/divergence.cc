#include "tetiqa/divergence.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "tetiqa/errors.h"

namespace tetiqa {
namespace {

void CheckWeibull(const WeibullParams& p, const char* name) {
  if (!(p.shape > 0.0) || !(p.scale > 0.0) || !std::isfinite(p.shape) ||
      !std::isfinite(p.scale)) {
    throw InvalidInput(fmt::format(
        "kld_weibull: {} has nonpositive parameter (k = {}, lambda = {})", name,
        p.shape, p.scale));
  }
}

Eigen::LLT<Eigen::MatrixXd> Factorize(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                      const char* name) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput(fmt::format("kld_gaussian: {} is not positive definite", name));
  }
  return llt;
}

double LogDet(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

double KldWeibull(const WeibullParams& p1, const WeibullParams& p2) {
  CheckWeibull(p1, "p1");
  CheckWeibull(p2, "p2");
  if (p1 == p2) return 0.0;
  const double k1 = p1.shape, l1 = p1.scale;
  const double k2 = p2.shape, l2 = p2.scale;
  const double log_l1 = std::log(l1);
  const double log_l2 = std::log(l2);
  const double value =
      (std::log(k1) - k1 * log_l1) - (std::log(k2) - k2 * log_l2) +
      (k1 - k2) * (log_l1 - std::numbers::egamma / k1) +
      std::exp(k2 * (log_l1 - log_l2) + std::lgamma(k2 / k1 + 1.0)) - 1.0;
  return std::max(value, 0.0);
}

double KldGaussianZeroMean(const Eigen::Ref<const Eigen::MatrixXd>& m1,
                           const Eigen::Ref<const Eigen::MatrixXd>& m2) {
  if (m1.rows() != m1.cols() || m2.rows() != m2.cols() || m1.rows() != m2.rows() ||
      m1.rows() == 0) {
    throw InvalidInput(fmt::format(
        "kld_gaussian: dimension mismatch ({}x{} vs {}x{})", m1.rows(),
        m1.cols(), m2.rows(), m2.cols()));
  }
  const auto llt1 = Factorize(m1, "m1");
  const auto llt2 = Factorize(m2, "m2");
  if (m1 == m2) return 0.0;

  // tr(M2^-1 M1) = ||L2^-1 L1||_F^2.
  const Eigen::MatrixXd l1 = llt1.matrixL();
  const Eigen::MatrixXd x = llt2.matrixL().solve(l1);
  const double trace = x.squaredNorm();
  const double n = static_cast<double>(m1.rows());
  const double value = 0.5 * (trace + LogDet(llt2) - LogDet(llt1) - n);
  return std::max(value, 0.0);
}

SubbandDistance KldJoint(const SubbandFeatures& f1, const SubbandFeatures& f2) {
  if (f1.scale != f2.scale || f1.orientation != f2.orientation) {
    throw InvalidInput(fmt::format(
        "kld_joint: subband mismatch (scale {}, orientation {}) vs (scale {}, "
        "orientation {})",
        f1.scale, f1.orientation, f2.scale, f2.orientation));
  }
  SubbandDistance out;
  out.scale = f1.scale;
  out.orientation = f1.orientation;
  out.d = KldWeibull(f1.weibull, f2.weibull) + KldGaussianZeroMean(f1.cov, f2.cov);
  return out;
}

std::vector<SubbandDistance> CompareFeatureSets(const RRFeatureSet& reference,
                                                const RRFeatureSet& distorted) {
  if (reference.subbands.size() != distorted.subbands.size()) {
    throw InvalidInput(fmt::format(
        "compare: reference has {} subbands, distorted has {}",
        reference.subbands.size(), distorted.subbands.size()));
  }
  std::vector<SubbandDistance> out;
  out.reserve(reference.subbands.size());
  for (std::size_t i = 0; i < reference.subbands.size(); ++i) {
    out.push_back(KldJoint(reference.subbands[i], distorted.subbands[i]));
  }
  return out;
}

double Pool(std::span<const SubbandDistance> distances, double d0) {
  if (distances.empty()) throw InvalidInput("pool: no subband distances");
  if (!(d0 > 0.0) || !std::isfinite(d0)) {
    throw InvalidInput(fmt::format("pool: d0 must be positive, got {}", d0));
  }
  double sum = 0.0;
  for (const SubbandDistance& d : distances) {
    if (!std::isfinite(d.d)) {
      throw InvalidInput(fmt::format(
          "pool: non-finite distance for subband (scale {}, orientation {})",
          d.scale, d.orientation));
    }
    sum += d.d;
  }
  return std::log2(1.0 + sum / d0);
}

}  // namespace tetiqa
