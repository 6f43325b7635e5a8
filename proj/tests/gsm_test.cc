#include "tetiqa/gsm.h"

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "tetiqa/errors.h"
#include "testing/oracles.h"
#include "testing/synthetic.h"

namespace tetiqa {
namespace {

std::vector<double> WeibullSamples(double k, double lambda, std::size_t n,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::weibull_distribution<double> dist(k, lambda);
  std::vector<double> out(n);
  for (double& x : out) x = dist(rng);
  return out;
}

TEST(NeighborhoodTest, CountsAndOrder) {
  ImagePlane s(3, 3);
  for (std::size_t i = 0; i < 9; ++i) s.samples()[i] = static_cast<double>(i);
  const auto one = ExtractNeighborhoods(s);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].row, 1u);
  EXPECT_EQ(one[0].col, 1u);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(one[0].y[i], i);

  std::mt19937_64 rng(1);
  const auto many = ExtractNeighborhoods(testing::RandomImage(16, 16, rng));
  EXPECT_EQ(many.size(), 196u);
  EXPECT_EQ(many[1].col, 2u);
  EXPECT_EQ(many[14].row, 2u);

  const auto rect = ExtractNeighborhoods(ImagePlane(5, 4));
  EXPECT_EQ(rect.size(), 6u);
}

TEST(NeighborhoodTest, RejectsTinySubbands) {
  EXPECT_THROW(ExtractNeighborhoods(ImagePlane(2, 8)), InvalidInput);
  EXPECT_THROW(ExtractNeighborhoods(ImagePlane(8, 2)), InvalidInput);
}

TEST(CovarianceTest, RecoversKnownGaussian) {
  std::mt19937_64 rng(2024);
  const Eigen::MatrixXd sigma = testing::RandomSpd(9, rng);
  const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
  std::normal_distribution<double> normal;
  std::vector<NeighborhoodVector> vectors(100000);
  for (NeighborhoodVector& v : vectors) {
    Vector9 z;
    for (int i = 0; i < 9; ++i) z[i] = normal(rng);
    v.y = l * z;
  }
  const Matrix9 c = EstimateCovariance(vectors);
  EXPECT_LT((c - sigma).norm() / sigma.norm(), 0.05);
  EXPECT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix9>(c).eigenvalues().minCoeff(), 0.0);
}

TEST(CovarianceTest, ExactOnTwoVectors) {
  // Two vectors a, b: mean-removed outer products sum to (a-b)(a-b)^T / 2,
  // divided by n - 1 = 1.
  std::vector<NeighborhoodVector> v(2);
  v[0].y = Vector9::LinSpaced(1.0, 9.0);
  v[1].y = Vector9::Zero();
  const Matrix9 c = EstimateCovariance(v, 0.0);
  const Matrix9 expected = 0.5 * v[0].y * v[0].y.transpose();
  // epsilon = 0 still leaves the absolute 1e-12 floor.
  EXPECT_LT((c - expected - 1e-12 * Matrix9::Identity()).cwiseAbs().maxCoeff(), 1e-13);

  const Matrix9 ridged = EstimateCovariance(v, 1e-3);
  const double ridge = 1e-3 * expected.trace() / 9.0;
  EXPECT_LT((ridged - expected - ridge * Matrix9::Identity()).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(CovarianceTest, IdenticalVectorsGiveScaledIdentity) {
  std::vector<NeighborhoodVector> v(50);
  for (NeighborhoodVector& n : v) n.y = Vector9::Constant(4.0);
  const Matrix9 c = EstimateCovariance(v);
  EXPECT_GT(c(0, 0), 0.0);
  EXPECT_EQ(c, c(0, 0) * Matrix9::Identity());
}

TEST(CovarianceTest, RejectsFewerThanTwoVectors) {
  std::vector<NeighborhoodVector> v(1);
  EXPECT_THROW(EstimateCovariance(v), InvalidInput);
  EXPECT_THROW(EstimateCovariance({}), InvalidInput);
}

TEST(MultiplierTest, SimpleCases) {
  EXPECT_DOUBLE_EQ(EstimateMultiplier(Vector9::Constant(3.0), Matrix9::Identity()), 3.0);
  EXPECT_EQ(EstimateMultiplier(Vector9::Zero(), Matrix9::Identity()), 0.0);
  EXPECT_DOUBLE_EQ(EstimateMultiplier(Vector9::Constant(3.0), 9.0 * Matrix9::Identity()),
                   1.0);
}

TEST(MultiplierTest, MatchesExplicitInverse) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix9 m = testing::RandomSpd(9, rng);
    Vector9 y;
    for (int i = 0; i < 9; ++i) y[i] = 10.0 * normal(rng);
    const double expected = testing::MultiplierByInverse(y, m);
    EXPECT_NEAR(EstimateMultiplier(y, m), expected, 1e-10 * std::max(1.0, expected));
  }
}

TEST(MultiplierTest, ScaleEquivariantAndPositive) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> normal;
  const Matrix9 m = testing::RandomSpd(9, rng);
  for (int trial = 0; trial < 50; ++trial) {
    Vector9 y;
    for (int i = 0; i < 9; ++i) y[i] = normal(rng);
    const double base = EstimateMultiplier(y, m);
    EXPECT_GT(base, 0.0);
    for (double c : {-3.0, 0.25, 7.0}) {
      EXPECT_NEAR(EstimateMultiplier(c * y, m), std::abs(c) * base, 1e-12 * std::abs(c) * base);
    }
  }
}

TEST(MultiplierTest, BatchMatchesSingle) {
  std::mt19937_64 rng(41);
  const auto vectors = ExtractNeighborhoods(testing::RandomImage(8, 8, rng));
  const Matrix9 m = EstimateCovariance(vectors);
  const std::vector<double> batch = EstimateMultipliers(vectors, m);
  ASSERT_EQ(batch.size(), vectors.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(batch[i], EstimateMultiplier(vectors[i].y, m));
  }
}

TEST(MultiplierTest, RejectsNonPositiveDefinite) {
  Matrix9 m = Matrix9::Identity();
  m(4, 4) = -1.0;
  EXPECT_THROW(EstimateMultiplier(Vector9::Ones(), m), InvalidInput);
}

TEST(WeibullFitTest, RecoversRayleighCase) {
  const WeibullParams p = FitWeibull(WeibullSamples(2.0, 1.0, 100000, 100));
  EXPECT_GE(p.shape, 1.96);
  EXPECT_LE(p.shape, 2.04);
  EXPECT_GE(p.scale, 0.99);
  EXPECT_LE(p.scale, 1.01);
}

TEST(WeibullFitTest, RecoversExponentialCase) {
  const WeibullParams p = FitWeibull(WeibullSamples(1.0, 3.0, 100000, 101));
  EXPECT_NEAR(p.shape, 1.0, 0.03);
  EXPECT_NEAR(p.scale, 3.0, 0.03 * 3.0);
}

TEST(WeibullFitTest, RecoversHeavyCase) {
  const WeibullParams p = FitWeibull(WeibullSamples(0.8, 3.0, 100000, 102));
  EXPECT_NEAR(p.shape, 0.8, 0.02 * 0.8);
  EXPECT_NEAR(p.scale, 3.0, 0.02 * 3.0);
}

TEST(WeibullFitTest, SolvesTheLikelihoodEquation) {
  // At the MLE: 1/k + mean(ln x) - sum(x^k ln x) / sum(x^k) = 0 and
  // lambda^k = mean(x^k). Checked directly on unnormalized samples.
  const std::vector<double> x = WeibullSamples(1.7, 2.5, 2000, 103);
  const WeibullParams p = FitWeibull(x);
  double s0 = 0, s1 = 0, lmean = 0;
  for (double v : x) {
    const double w = std::pow(v, p.shape);
    s0 += w;
    s1 += w * std::log(v);
    lmean += std::log(v);
  }
  lmean /= static_cast<double>(x.size());
  EXPECT_NEAR(1.0 / p.shape + lmean - s1 / s0, 0.0, 1e-9);
  EXPECT_NEAR(std::pow(p.scale, p.shape), s0 / static_cast<double>(x.size()), 1e-9);
}

TEST(WeibullFitTest, ScaleFamily) {
  const std::vector<double> x = WeibullSamples(1.3, 0.7, 5000, 104);
  const WeibullParams base = FitWeibull(x);
  for (double c : {1e-3, 4.0, 1e4}) {
    std::vector<double> scaled = x;
    for (double& v : scaled) v *= c;
    const WeibullParams p = FitWeibull(scaled);
    EXPECT_NEAR(p.shape, base.shape, 1e-8);
    EXPECT_NEAR(p.scale, c * base.scale, 1e-8 * c * base.scale);
  }
}

TEST(WeibullFitTest, ExtremeShapesConverge) {
  EXPECT_NEAR(FitWeibull(WeibullSamples(0.3, 1.0, 20000, 105)).shape, 0.3, 0.01);
  EXPECT_NEAR(FitWeibull(WeibullSamples(20.0, 1.0, 20000, 106)).shape, 20.0, 0.6);
}

TEST(WeibullFitTest, Errors) {
  EXPECT_THROW(FitWeibull(std::vector<double>(29, 1.5)), DegenerateData);
  EXPECT_THROW(FitWeibull(std::vector<double>(100, 1.5)), DegenerateData);
  std::vector<double> with_zero = WeibullSamples(1.0, 1.0, 100, 107);
  with_zero[10] = 0.0;
  EXPECT_THROW(FitWeibull(with_zero), InvalidInput);
  with_zero[10] = std::nan("");
  EXPECT_THROW(FitWeibull(with_zero), InvalidInput);
}

TEST(ExtractFeaturesTest, ShapeContract) {
  std::mt19937_64 rng(43);
  const ImagePlane image = testing::RandomImage(64, 64, rng);
  const RRFeatureSet f = ExtractFeatures(Forward(image, 2));
  EXPECT_EQ(f.levels, 2);
  ASSERT_EQ(f.subbands.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    const SubbandFeatures& s = f.subbands[i];
    EXPECT_EQ(s.scale, static_cast<int>(i / 3) + 1);
    EXPECT_EQ(s.orientation, static_cast<int>(i % 3) + 1);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix9>(s.cov).eigenvalues().minCoeff(), 0.0);
    EXPECT_EQ(s.cov, s.cov.transpose());
    EXPECT_GT(s.weibull.shape, 0.0);
    EXPECT_GT(s.weibull.scale, 0.0);
    EXPECT_EQ(s.dropped_zero_fraction, 0.0);
  }
}

TEST(ExtractFeaturesTest, WhiteNoiseFitIsGammaLike) {
  // For white Gaussian noise with a well estimated M, 9 x^2 is roughly
  // chi-square with 9 degrees of freedom, so x concentrates near 1 and the
  // fitted shape is large.
  const ImagePlane noise = testing::AddGaussianNoise(ImagePlane(128, 128, 0.0), 10.0, 9);
  const RRFeatureSet f = ExtractFeatures(Forward(noise, 2));
  for (const SubbandFeatures& s : f.subbands) {
    EXPECT_GT(s.weibull.shape, 2.0);
    EXPECT_NEAR(s.weibull.scale, 1.0, 0.25);
  }
}

TEST(ExtractFeaturesTest, Deterministic) {
  std::mt19937_64 rng(47);
  const TetroletDecomposition d = Forward(testing::RandomImage(32, 32, rng), 2);
  const RRFeatureSet a = ExtractFeatures(d);
  const RRFeatureSet b = ExtractFeatures(d);
  for (std::size_t i = 0; i < a.subbands.size(); ++i) {
    EXPECT_EQ(a.subbands[i].cov, b.subbands[i].cov);
    EXPECT_EQ(a.subbands[i].weibull, b.subbands[i].weibull);
  }
}

TEST(ExtractFeaturesTest, FlatSubbandIsTaggedAndDegenerate) {
  const TetroletDecomposition d = Forward(ImagePlane(64, 64, 100.0), 2);
  try {
    ExtractFeatures(d);
    FAIL() << "expected DegenerateData";
  } catch (const DegenerateData& e) {
    EXPECT_NE(std::string(e.what()).find("subband (scale 1, orientation 1)"),
              std::string::npos)
        << e.what();
  }
}

TEST(ExtractFeaturesTest, TooSmallSubbandIsTagged) {
  std::mt19937_64 rng(53);
  const TetroletDecomposition d = Forward(testing::RandomImage(16, 16, rng), 2);
  // The level-2 subbands are 4x4: enough windows for a covariance but not
  // for a Weibull fit.
  EXPECT_THROW(ExtractFeatures(d), DegenerateData);
}

}  // namespace
}  // namespace tetiqa
