// Copyright 2026 The ldpfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpfisher/models.h"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "ldpfisher/errors.h"

namespace ldpfisher {
namespace {

TEST(ScoreTest, BernoulliValues) {
  const StatModel model = StatModel::BernoulliProduct(1);
  EXPECT_DOUBLE_EQ(model.Score({0.25}, {1.0})[0], 4.0);
  EXPECT_DOUBLE_EQ(model.Score({0.5}, {0.0})[0], -2.0);
}

TEST(ScoreTest, MultinomialLastCategory) {
  const StatModel model = StatModel::Multinomial(2);
  const ScoreVector s = model.Score({0.3, 0.3}, {3.0});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[0], -2.5, 1e-12);
  EXPECT_NEAR(s[1], -2.5, 1e-12);
}

TEST(ScoreTest, GaussianValueMatchesFiniteDifference) {
  const StatModel model = StatModel::GaussianLocation(1, 1.0);
  EXPECT_DOUBLE_EQ(model.Score({0.0}, {1.0})[0], 1.0);
  const double h = 1e-6;
  const double fd = (std::log(model.Density({h}, {1.0})) -
                     std::log(model.Density({-h}, {1.0}))) /
                    (2 * h);
  EXPECT_NEAR(fd, 1.0, 1e-6);
}

TEST(ScoreTest, SingularParametersRejected) {
  const StatModel bern = StatModel::BernoulliProduct(2);
  EXPECT_THROW(bern.Score({0.0, 0.5}, {1.0, 0.0}), SingularParameterError);
  EXPECT_THROW(bern.Score({0.5, 1.0}, {1.0, 0.0}), SingularParameterError);
  const StatModel multi = StatModel::Multinomial(2);
  EXPECT_THROW(multi.Score({0.5, 0.5}, {1.0}), SingularParameterError);
  EXPECT_THROW(bern.Score({0.5}, {1.0}), DimensionMismatchError);
}

class FiniteModelTest : public ::testing::TestWithParam<int> {
 protected:
  StatModel Model() const {
    return GetParam() == 0 ? StatModel::BernoulliProduct(3)
                           : StatModel::Multinomial(3);
  }
};

TEST_P(FiniteModelTest, PmfSumsToOneAndScoreIsMeanZero) {
  const StatModel model = Model();
  for (const ParamPoint& theta :
       {ParamPoint{0.1, 0.2, 0.3}, ParamPoint{0.05, 0.4, 0.25}}) {
    const std::vector<double> pmf = model.Pmf(theta);
    EXPECT_NEAR(std::accumulate(pmf.begin(), pmf.end(), 0.0), 1.0, 1e-12);
    std::vector<double> mean(3, 0.0);
    for (std::size_t x = 0; x < pmf.size(); ++x) {
      const ScoreVector s = model.ScoreAt(theta, x);
      for (int j = 0; j < 3; ++j) mean[j] += pmf[x] * s[j];
    }
    for (double m : mean) EXPECT_NEAR(m, 0.0, 1e-12);
  }
}

TEST_P(FiniteModelTest, ScoreMatchesFiniteDifferences) {
  const StatModel model = Model();
  const ParamPoint theta{0.15, 0.25, 0.35};
  const double h = 1e-6;
  for (std::size_t x = 0; x < model.SampleSpaceSize(); ++x) {
    const ScoreVector s = model.ScoreAt(theta, x);
    for (int j = 0; j < 3; ++j) {
      ParamPoint up = theta;
      ParamPoint down = theta;
      up[j] += h;
      down[j] -= h;
      const double fd =
          (std::log(model.MassAt(up, x)) - std::log(model.MassAt(down, x))) / (2 * h);
      EXPECT_NEAR(fd, s[j], 1e-6 * std::max(1.0, std::abs(s[j])));
    }
  }
}

TEST_P(FiniteModelTest, IndexRoundTrip) {
  const StatModel model = Model();
  for (std::size_t x = 0; x < model.SampleSpaceSize(); ++x) {
    EXPECT_EQ(model.IndexOf(model.PointAt(x)), x);
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, FiniteModelTest, ::testing::Values(0, 1));

TEST(SampleTest, DegenerateParameters) {
  CounterRng rng(1);
  const StatModel bern = StatModel::BernoulliProduct(4);
  const StatModel multi = StatModel::Multinomial(3);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(bern.Draw({1.0, 1.0, 1.0, 1.0}, rng), (Sample{1, 1, 1, 1}));
    EXPECT_EQ(multi.Draw({1.0, 0.0, 0.0}, rng), (Sample{1.0}));
  }
}

TEST(SampleTest, BernoulliMean) {
  CounterRng rng(2);
  const StatModel model = StatModel::BernoulliProduct(1);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += model.Draw({0.5}, rng)[0];
  EXPECT_NEAR(sum / n, 0.5, 3 * 0.5 / std::sqrt(n));
}

TEST(SampleTest, DeterministicGivenSeed) {
  const StatModel model = StatModel::Multinomial(4);
  CounterRng a(77);
  CounterRng b(77);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(model.DrawIndex({0.1, 0.2, 0.3, 0.1}, a),
              model.DrawIndex({0.1, 0.2, 0.3, 0.1}, b));
  }
}

TEST(ScoreVarianceTest, CorollaryDomainValues) {
  for (int d : {2, 4, 8}) {
    const StatModel multi = StatModel::Multinomial(d);
    EXPECT_LE(ScoreVarianceSup(multi, ParamDomain::Cube(d, 1.0 / (4 * d), 1.0 / (2 * d))),
              6.0 * d);
    const StatModel bern = StatModel::BernoulliProduct(d);
    EXPECT_LE(ScoreVarianceSup(bern, ParamDomain::Cube(d, 1.0 / (2 * d), 1.0 / d)),
              3.0 * d);
  }
  const StatModel gauss = StatModel::GaussianLocation(3, 2.0);
  EXPECT_DOUBLE_EQ(ScoreVarianceSup(gauss, ParamDomain::Centered(3, 5.0)), 0.25);
}

TEST(ScoreVarianceTest, DominatesRandomDirections) {
  CounterRng rng(4);
  const StatModel model = StatModel::Multinomial(3);
  const ParamDomain domain = ParamDomain::Cube(3, 1.0 / 12, 1.0 / 6);
  const double i0 = ScoreVarianceSup(model, domain);
  for (int g = 0; g < 20; ++g) {
    ParamPoint theta(3);
    for (double& t : theta) t = 1.0 / 12 + rng.Uniform() / 12;
    const std::vector<double> pmf = model.Pmf(theta);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> u(3);
      double norm = 0.0;
      for (double& v : u) {
        v = rng.Normal();
        norm += v * v;
      }
      double second = 0.0;
      for (std::size_t x = 0; x < pmf.size(); ++x) {
        const ScoreVector s = model.ScoreAt(theta, x);
        double dot = 0.0;
        for (int j = 0; j < 3; ++j) dot += u[j] * s[j] / std::sqrt(norm);
        second += pmf[x] * dot * dot;
      }
      EXPECT_LE(second, i0 * (1 + 1e-12));
    }
  }
}

TEST(SubgaussianTest, BernoulliMomentCondition) {
  const int d = 16;
  const double s = 1.0;
  const StatModel model = StatModel::BernoulliProduct(d);
  ParamDomain domain = ParamDomain::Cube(d, s / (2 * d), s / d);
  domain.sum_budget = s;
  const double sigma2 = SubgaussianParam(model, domain);
  EXPECT_GT(sigma2, 0.0);
  std::vector<double> axis(d, 0.0);
  axis[0] = 1.0;
  std::vector<double> diag(d, 1.0 / std::sqrt(d));
  for (const ParamPoint& theta : {ParamPoint(d, s / (2 * d)), ParamPoint(d, s / d)}) {
    EXPECT_LE(SubgaussianMoment(model, theta, axis, sigma2), 2.0 + 1e-9);
    EXPECT_LE(SubgaussianMoment(model, theta, diag, sigma2), 2.0 + 1e-9);
  }
}

TEST(SubgaussianTest, SingleBernoulliTwoPoint) {
  const StatModel model = StatModel::BernoulliProduct(1);
  const double sigma2 = SubgaussianParam(model, ParamDomain::Cube(1, 0.5, 0.5 + 1e-6));
  // Scores are +-2 with probability 1/2 each.
  EXPECT_LE(std::exp(4.0 / sigma2), 2.0 + 1e-9);
}

TEST(SubgaussianTest, GaussianAndMultinomial) {
  const StatModel gauss = StatModel::GaussianLocation(2, 1.0);
  const double sigma2 = SubgaussianParam(gauss, ParamDomain::Centered(2, 1.0));
  // E exp(Z^2 / sigma2) for Z ~ N(0, 1) is (1 - 2/sigma2)^(-1/2).
  ASSERT_GT(sigma2, 2.0);
  EXPECT_LE(1.0 / std::sqrt(1.0 - 2.0 / sigma2), 2.0 + 1e-9);
  EXPECT_THROW(SubgaussianParam(StatModel::Multinomial(2), ParamDomain::Cube(2, 0.1, 0.2)),
               UnsupportedError);
}

TEST(ParamDomainTest, GridShapes) {
  EXPECT_EQ(ParamDomain::Cube(2, 0.1, 0.2).Grid().size(), 17u * 17u);
  EXPECT_EQ(ParamDomain::Cube(5, 0.1, 0.2).Grid().size(), 9u);
  EXPECT_DOUBLE_EQ(ParamDomain::Centered(3, 2.0).HalfWidth(), 2.0);
  EXPECT_THROW(ParamDomain::Cube(2, 0.3, 0.2).Validate(), ArgumentDomainError);
}

}  // namespace
}  // namespace ldpfisher
