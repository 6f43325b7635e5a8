#include "tetiqa/gsm.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "tetiqa/errors.h"

namespace tetiqa {
namespace {

constexpr double kTraceFloor = 1e-12;
constexpr double kWeibullTolerance = 1e-8;
constexpr int kWeibullMaxIterations = 200;

Eigen::LLT<Matrix9> Factorize(const Matrix9& m) {
  Eigen::LLT<Matrix9> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("gsm: covariance matrix is not positive definite");
  }
  return llt;
}

double MultiplierFrom(const Eigen::LLT<Matrix9>& llt, const Vector9& y) {
  const Vector9 z = llt.matrixL().solve(y);
  return std::sqrt(z.squaredNorm() / kNeighborhoodSize);
}

}  // namespace

std::vector<NeighborhoodVector> ExtractNeighborhoods(const ImagePlane& subband) {
  if (subband.width() < 3 || subband.height() < 3) {
    throw InvalidInput(fmt::format(
        "gsm: subband {}x{} is smaller than the 3x3 neighborhood",
        subband.width(), subband.height()));
  }
  std::vector<NeighborhoodVector> out;
  out.reserve((subband.width() - 2) * (subband.height() - 2));
  for (std::size_t r = 1; r + 1 < subband.height(); ++r) {
    for (std::size_t c = 1; c + 1 < subband.width(); ++c) {
      NeighborhoodVector v;
      v.row = r;
      v.col = c;
      int k = 0;
      for (std::size_t i = r - 1; i <= r + 1; ++i) {
        for (std::size_t j = c - 1; j <= c + 1; ++j) v.y[k++] = subband.at(i, j);
      }
      out.push_back(v);
    }
  }
  return out;
}

Matrix9 EstimateCovariance(std::span<const NeighborhoodVector> vectors,
                           double epsilon) {
  if (vectors.size() < 2) {
    throw InvalidInput(fmt::format(
        "gsm: covariance needs at least 2 vectors, got {}", vectors.size()));
  }
  Vector9 mean = Vector9::Zero();
  for (const NeighborhoodVector& v : vectors) mean += v.y;
  mean /= static_cast<double>(vectors.size());

  Matrix9 cov = Matrix9::Zero();
  for (const NeighborhoodVector& v : vectors) {
    const Vector9 d = v.y - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(vectors.size() - 1);
  cov = 0.5 * (cov + cov.transpose()).eval();

  const double trace = cov.trace();
  const double ridge = std::max(epsilon * trace / kNeighborhoodSize, kTraceFloor);
  cov.diagonal().array() += ridge;
  return cov;
}

double EstimateMultiplier(const Vector9& y, const Matrix9& m) {
  return MultiplierFrom(Factorize(m), y);
}

std::vector<double> EstimateMultipliers(
    std::span<const NeighborhoodVector> vectors, const Matrix9& m) {
  const Eigen::LLT<Matrix9> llt = Factorize(m);
  std::vector<double> out;
  out.reserve(vectors.size());
  for (const NeighborhoodVector& v : vectors) out.push_back(MultiplierFrom(llt, v.y));
  return out;
}

WeibullParams FitWeibull(std::span<const double> samples) {
  if (samples.size() < kMinWeibullSamples) {
    throw DegenerateData(fmt::format(
        "weibull: need at least {} positive samples, got {}",
        kMinWeibullSamples, samples.size()));
  }
  const std::size_t n = samples.size();
  std::vector<double> logs(n);
  double log_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(samples[i] > 0.0) || !std::isfinite(samples[i])) {
      throw InvalidInput(
          fmt::format("weibull: sample {} is not finite and positive", i));
    }
    logs[i] = std::log(samples[i]);
    log_mean += logs[i];
  }
  log_mean /= static_cast<double>(n);

  // Work on log(x / geometric mean): the shape estimate is scale invariant
  // and large k no longer overflows x^k.
  double log_var = 0.0;
  for (double& t : logs) {
    t -= log_mean;
    log_var += t * t;
  }
  log_var /= static_cast<double>(n);
  if (!(log_var > 0.0)) {
    throw DegenerateData("weibull: all samples are equal");
  }
  const double t_max = *std::max_element(logs.begin(), logs.end());
  const double t_min = *std::min_element(logs.begin(), logs.end());

  // Moments of the exponentially weighted log-samples, shifted by the largest
  // exponent for stability.
  struct Moments {
    double s0, s1, s2, shift;
  };
  const auto moments = [&](double k) {
    const double shift = k > 0 ? k * t_max : k * t_min;
    Moments m{0.0, 0.0, 0.0, shift};
    for (double t : logs) {
      const double w = std::exp(k * t - shift);
      m.s0 += w;
      m.s1 += w * t;
      m.s2 += w * t * t;
    }
    return m;
  };

  // log(x) of a Weibull variable is Gumbel with standard deviation
  // pi / (sqrt(6) k).
  double k = std::numbers::pi / (std::sqrt(6.0 * log_var));
  for (int iter = 0; iter < kWeibullMaxIterations; ++iter) {
    const Moments m = moments(k);
    const double mean_t = m.s1 / m.s0;
    const double var_t = m.s2 / m.s0 - mean_t * mean_t;
    const double g = 1.0 / k - mean_t;
    const double dg = -1.0 / (k * k) - var_t;
    double next = k - g / dg;
    if (!(next > 0.0)) next = 0.5 * k;
    const double step = std::abs(next - k);
    k = next;
    if (step < kWeibullTolerance) {
      const Moments fin = moments(k);
      const double log_mean_xk =
          fin.shift + std::log(fin.s0 / static_cast<double>(n));
      return WeibullParams{k, std::exp(log_mean + log_mean_xk / k)};
    }
  }
  throw ConvergenceError(
      fmt::format("weibull: shape did not converge in {} iterations (last k = {})",
                  kWeibullMaxIterations, k),
      k);
}

SubbandFeatures ExtractSubbandFeatures(const ImagePlane& subband, int scale,
                                       int orientation,
                                       const GsmOptions& options) {
  const std::vector<NeighborhoodVector> vectors = ExtractNeighborhoods(subband);
  SubbandFeatures features;
  features.scale = scale;
  features.orientation = orientation;
  features.cov = EstimateCovariance(vectors, options.epsilon_reg);

  std::vector<double> multipliers = EstimateMultipliers(vectors, features.cov);
  const std::size_t total = multipliers.size();
  std::erase_if(multipliers, [](double x) { return x == 0.0; });
  features.dropped_zero_fraction =
      static_cast<double>(total - multipliers.size()) / static_cast<double>(total);
  features.weibull = FitWeibull(multipliers);
  return features;
}

RRFeatureSet ExtractFeatures(const TetroletDecomposition& decomposition,
                             const GsmOptions& options) {
  RRFeatureSet out;
  out.levels = static_cast<int>(decomposition.levels.size());
  for (std::size_t r = 0; r < decomposition.levels.size(); ++r) {
    for (int l = 0; l < kNumOrientations; ++l) {
      const int scale = static_cast<int>(r) + 1;
      const int orientation = l + 1;
      const std::string where =
          fmt::format("subband (scale {}, orientation {}): ", scale, orientation);
      try {
        out.subbands.push_back(ExtractSubbandFeatures(
            decomposition.levels[r].details[l], scale, orientation, options));
      } catch (const ConvergenceError& e) {
        throw ConvergenceError(where + e.what(), e.last_iterate());
      } catch (const DegenerateData& e) {
        throw DegenerateData(where + e.what());
      } catch (const InvalidInput& e) {
        throw InvalidInput(where + e.what());
      }
    }
  }
  return out;
}

}  // namespace tetiqa
