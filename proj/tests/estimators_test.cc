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

#include "ldpfisher/estimators.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "ldpfisher/channels.h"
#include "ldpfisher/combinatorics.h"
#include "ldpfisher/errors.h"
#include "ldpfisher/oracle.h"

namespace ldpfisher {
namespace {

std::vector<double> SubsetIndicators(int d, int w) {
  const std::uint64_t count = BinomialU64(d, w);
  std::vector<double> out(count * d, 0.0);
  for (std::uint64_t y = 0; y < count; ++y) {
    for (int i : UnrankSubset(y, d, w)) out[y * d + i] = 1.0;
  }
  return out;
}

std::vector<double> ProductLaw(std::span<const double> theta) {
  const int d = static_cast<int>(theta.size());
  std::vector<double> law(std::size_t{1} << d, 1.0);
  for (std::size_t x = 0; x < law.size(); ++x) {
    for (int j = 0; j < d; ++j) law[x] *= (x >> j) & 1U ? theta[j] : 1 - theta[j];
  }
  return law;
}

TEST(ChooseWTest, SelectionRule) {
  EXPECT_EQ(ChooseW(10, std::log(4.0)), 2);
  EXPECT_EQ(ChooseW(10, std::log(10.0)), 1);
  EXPECT_EQ(ChooseW(10, 5.0), 1);
  for (double eps : {0.01, 1.0, 9.0}) EXPECT_EQ(ChooseW(2, eps), 1);
  EXPECT_EQ(ChooseW(100, 0.01), 50);
}

TEST(YeBargEstimatorTest, Coefficients) {
  const AffineEstimatorSpec spec = YeBargEstimatorSpec(3, 1, std::log(2.0));
  EXPECT_NEAR(spec.slope, 4.0, 1e-14);
  EXPECT_NEAR(spec.intercept, 1.0, 1e-14);
  const AffineEstimatorSpec limit = YeBargEstimatorSpec(5, 1, 40.0);
  EXPECT_NEAR(limit.slope, 1.0, 1e-12);
  EXPECT_NEAR(limit.intercept, 0.0, 1e-12);
}

TEST(YeBargEstimatorTest, ExactExpectation) {
  const double eps = std::log(2.0);
  const std::vector<double> p{0.5, 0.3, 0.2};
  const oracle::AffineMoments m = oracle::ExactAffineEstimatorMoments(
      MakeYeBarg(3, 1, eps).Materialize(), p, SubsetIndicators(3, 1), p,
      YeBargEstimatorSpec(3, 1, eps), 100.0);
  for (double b : m.bias) EXPECT_NEAR(b, 0.0, 1e-12);
}

TEST(YeBargEstimatorTest, CountsAndReportsAgree) {
  const std::vector<std::vector<int>> reports{{0}, {2}, {2}, {1}};
  const std::vector<double> counts{1, 1, 2};
  const std::vector<double> a = YeBargEstimate(reports, 3, 1, std::log(2.0));
  const std::vector<double> b = YeBargEstimateFromCounts(counts, 4, 3, 1, std::log(2.0));
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a[2], 4 * 0.5 - 1, 1e-15);
  EXPECT_THROW(YeBargEstimate({}, 3, 1, 1.0), ArgumentDomainError);
}

TEST(YeBargEstimatorTest, PermutationEquivariant) {
  const std::vector<double> counts{3, 9, 4, 1, 7};
  const std::vector<int> perm{3, 0, 4, 2, 1};
  std::vector<double> permuted(5);
  for (int i = 0; i < 5; ++i) permuted[perm[i]] = counts[i];
  const std::vector<double> a = YeBargEstimateFromCounts(counts, 12, 5, 2, 1.0);
  const std::vector<double> b = YeBargEstimateFromCounts(permuted, 12, 5, 2, 1.0);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(b[perm[i]], a[i]);
}

TEST(YeBargRiskTest, ClosedFormValues) {
  EXPECT_NEAR(YeBargRiskFormula(3, 1, std::log(2.0), 1.0, 1.0 / 3), 32.0 / 3, 1e-12);
  const double big = YeBargRiskFormula(6, 1, 40.0, 1.0, 0.3);
  EXPECT_NEAR(big, 1.0 - 0.3, 1e-9);
  EXPECT_THROW(YeBargRiskFormula(3, 3, 1.0, 1.0, 0.5), ArgumentDomainError);
  EXPECT_THROW(YeBargRiskFormula(3, 1, 0.0, 1.0, 0.5), ArgumentDomainError);
}

TEST(YeBargRiskTest, MonteCarloMatchesFormula) {
  const int d = 4;
  const double eps = 1.0;
  const int n = 20000;
  const int trials = 300;
  const std::vector<double> p{0.4, 0.3, 0.2, 0.1};
  const YeBargChannel channel = MakeYeBarg(d, 1, eps);
  CounterRng rng(77);
  std::vector<double> losses;
  std::vector<int> subset;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> counts(d, 0.0);
    for (int k = 0; k < n; ++k) {
      const double u = rng.Uniform();
      int x = 0;
      for (double acc = p[0]; x < d - 1 && u >= acc; acc += p[++x]) {
      }
      channel.SampleInto(x, rng, subset);
      for (int i : subset) counts[i] += 1.0;
    }
    const std::vector<double> est = YeBargEstimateFromCounts(counts, n, d, 1, eps);
    double loss = 0.0;
    for (int i = 0; i < d; ++i) loss += (est[i] - p[i]) * (est[i] - p[i]);
    losses.push_back(loss);
  }
  const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / trials;
  double var = 0.0;
  for (double l : losses) var += (l - mean) * (l - mean);
  const double se = std::sqrt(var / (trials - 1) / trials);
  EXPECT_NEAR(mean, YeBargRiskFormula(d, 1, eps, n, 0.3), 3 * se);
}

TEST(KrrFrequencyTest, ExactlyUnbiased) {
  for (int k : {2, 3, 6}) {
    for (double eps : {0.5, 2.0}) {
      std::vector<double> p(k);
      for (int i = 0; i < k; ++i) p[i] = (i + 1.0) / (k * (k + 1) / 2.0);
      const std::vector<double> out = PushForward(MakeKrr(k, eps).Materialize(), p);
      std::vector<double> counts(k);
      for (int i = 0; i < k; ++i) counts[i] = 1000.0 * out[i];
      const std::vector<double> est = KrrFrequencyEstimate(counts, 1000.0, k, eps);
      for (int i = 0; i < k; ++i) EXPECT_NEAR(est[i], p[i], 1e-12);
    }
  }
}

TEST(ReductionTest, IdentitiesWithoutHalving) {
  const std::vector<double> theta{0.3, 0.2};
  const ReductionLaw law = ReductionProbabilities(theta, false);
  EXPECT_NEAR(law.p[0], 0.24, 1e-15);
  EXPECT_NEAR(law.p[1], 0.14, 1e-15);
  EXPECT_NEAR(law.p_s, 0.56, 1e-15);
  const std::vector<double> back = ThetaFromReduction(law.p, law.p_s, false);
  EXPECT_NEAR(back[0], 0.3, 1e-15);
  EXPECT_NEAR(back[1], 0.2, 1e-15);
  const ReductionLaw zero = ReductionProbabilities(std::vector<double>(3, 0.0), false);
  EXPECT_DOUBLE_EQ(zero.p_s, 1.0);
  for (double v : zero.p) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(ReductionTest, RoundTripWithHalving) {
  CounterRng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> theta(1 + t % 6);
    for (double& v : theta) v = rng.Uniform() / theta.size();
    const ReductionLaw law = ReductionProbabilities(theta, true);
    EXPECT_EQ(law.p.size(), 2 * theta.size());
    const std::vector<double> back = ThetaFromReduction(law.p, law.p_s, true);
    for (std::size_t j = 0; j < theta.size(); ++j) EXPECT_NEAR(back[j], theta[j], 1e-12);
  }
}

TEST(ReductionTest, SamplersMatchLaw) {
  const std::vector<double> theta{0.3, 0.1, 0.2};
  for (bool halving : {false, true}) {
    SparsePipelineConfig cfg;
    cfg.halving = halving;
    const SparseBernoulliPipeline pipe(3, 1.0, cfg);
    const ReductionLaw law = ReductionProbabilities(theta, halving);
    CounterRng rng(halving ? 8 : 9);
    const int draws = 200000;
    std::vector<double> f(pipe.reduced_dim() + 1, 0.0);
    double g_zero = 0.0;
    std::vector<std::uint8_t> x(3);
    for (int k = 0; k < draws; ++k) {
      for (int j = 0; j < 3; ++j) x[j] = rng.Uniform() < theta[j];
      f[pipe.ReduceF(x, rng)] += 1.0;
      g_zero += pipe.ReduceG(x, rng) == 0;
    }
    for (int i = 0; i < pipe.reduced_dim(); ++i) {
      const double sd = std::sqrt(draws * law.p[i] * (1 - law.p[i]));
      EXPECT_NEAR(f[i], draws * law.p[i], 4 * sd) << "i=" << i;
    }
    const double q = 1 - std::accumulate(law.p.begin(), law.p.end(), 0.0);
    EXPECT_NEAR(f.back(), draws * q, 4 * std::sqrt(draws * q * (1 - q)));
    EXPECT_NEAR(g_zero, draws * law.p_s, 4 * std::sqrt(draws * law.p_s * (1 - law.p_s)));
  }
}

TEST(TruncationTest, ImprovesExactRisk) {
  for (int d : {3, 5}) {
    for (double eps : {0.5, 1.0, 2.0}) {
      const int w = ChooseW(d, eps);
      const AffineEstimatorSpec spec = YeBargEstimatorSpec(d, w, eps);
      for (int n : {5, 40, 200}) {
        for (double p : {0.0, 0.02, 0.1, 0.3}) {
          const double q = (p + spec.intercept) / spec.slope;
          const auto raw = [&](int t) { return spec.slope * t / n - spec.intercept; };
          const auto trunc = [&](int t) { return std::max(0.0, raw(t)); };
          EXPECT_LE(oracle::ExactBinomialTransformMse(n, q, trunc, p),
                    oracle::ExactBinomialTransformMse(n, q, raw, p) + 1e-15);
        }
      }
      const AffineEstimatorSpec g = YeBargEstimatorSpec(2, 1, eps);
      for (int n : {5, 40, 200}) {
        for (double ps : {kPsFloor, 0.3, 0.6, 1.0}) {
          const double q = (ps + g.intercept) / g.slope;
          const auto raw = [&](int t) { return g.slope * t / n - g.intercept; };
          const auto floored = [&](int t) { return std::max(kPsFloor, raw(t)); };
          EXPECT_LE(oracle::ExactBinomialTransformMse(n, q, floored, ps),
                    oracle::ExactBinomialTransformMse(n, q, raw, ps) + 1e-15);
        }
      }
    }
  }
}

TEST(SparsePipelineTest, FloorAndTruncationHold) {
  const SparseBernoulliPipeline pipe(4, 0.5);
  SparseBernoulliPipeline::Tally tally = pipe.NewTally();
  EXPECT_DOUBLE_EQ(pipe.EstimatePs(tally), kPsFloor);
  for (int k = 0; k < 50; ++k) pipe.AddG(tally, 1);
  EXPECT_GE(pipe.EstimatePs(tally), kPsFloor);
  // Every f report names the null category only.
  for (int k = 0; k < 50; ++k) pipe.AddF(tally, std::vector<int>{pipe.reduced_dim()});
  for (double v : pipe.EstimateP(tally)) EXPECT_GE(v, 0.0);
  EXPECT_NEAR(kPsFloor, (1 - 1 / std::sqrt(2.0)) / std::exp(1 - 1 / std::sqrt(2.0)), 1e-16);
}

TEST(SparsePipelineTest, ZeroParameterShrinksToZero) {
  for (bool halving : {false, true}) {
    SparsePipelineConfig cfg;
    cfg.halving = halving;
    const int d = 6;
    double prev = 0.0;
    for (std::size_t n : {2000u, 200000u}) {
      BinaryMatrix samples(n, d);
      CounterRng rng(31 + n);
      const std::vector<double> est = SparseBernoulliEstimate(samples, 1.0, cfg, rng);
      double norm = 0.0;
      for (double v : est) {
        EXPECT_GE(v, 0.0);
        norm += v * v;
      }
      if (prev > 0.0) EXPECT_LT(norm, prev);
      prev = norm;
    }
  }
}

TEST(SparsePipelineTest, RecordsMatchDirectTally) {
  const SparseBernoulliPipeline pipe(3, 1.0);
  SparseBernoulliPipeline::Tally direct = pipe.NewTally();
  SparseBernoulliPipeline::Tally records = pipe.NewTally();
  CounterRng rng(4);
  std::vector<int> subset;
  const std::vector<std::uint8_t> x{0, 1, 0};
  for (std::uint64_t node = 0; node < 40; ++node) {
    pipe.ReportF(x, rng, subset);
    pipe.AddF(direct, subset);
    std::sort(subset.begin(), subset.end());
    pipe.AddRecord(records, {node, 0, RankSubset(subset)});
    const int g = pipe.ReportG(x, rng);
    pipe.AddG(direct, g);
    pipe.AddRecord(records, {node, 1, static_cast<std::uint64_t>(g)});
  }
  EXPECT_EQ(direct.counts_f, records.counts_f);
  EXPECT_EQ(direct.counts_g, records.counts_g);
  EXPECT_EQ(pipe.Estimate(direct), pipe.Estimate(records));
}

TEST(SparsePipelineTest, ConfigValidation) {
  SparsePipelineConfig cfg;
  cfg.split = 1.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg.split = 0.5;
  cfg.floor = 0.0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
}

TEST(GroupParamsTest, Examples) {
  const std::vector<double> theta{0.9, 0.8, 0.7, 0.5, 0.1};
  const auto groups = GroupParams(theta, 2.0);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(groups[1], (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(GroupParams(std::vector<double>{0.4}, 2.0).size(), 1u);
  const auto zeros = GroupParams(std::vector<double>(6, 0.0), 2.0);
  ASSERT_EQ(zeros.size(), 1u);
  EXPECT_EQ(zeros[0].size(), 6u);
  EXPECT_THROW(GroupParams(std::vector<double>{0.5, 2.5}, 2.0), ArgumentDomainError);
}

TEST(GroupParamsTest, ValidPackingsUnderFuzz) {
  CounterRng rng(21);
  for (int t = 0; t < 500; ++t) {
    const int d = 1 + static_cast<int>(rng.UniformInt(30));
    std::vector<double> theta(d);
    double total = 0.0;
    for (double& v : theta) total += v = 2.0 * rng.Uniform() * rng.Uniform();
    const auto groups = GroupParams(theta, 2.0);
    std::vector<int> seen(d, 0);
    for (const auto& g : groups) {
      double sum = 0.0;
      for (int i : g) {
        sum += theta[i];
        ++seen[i];
      }
      EXPECT_LE(sum, 2.0 + 1e-12);
    }
    for (int c : seen) EXPECT_EQ(c, 1);
    EXPECT_LE(groups.size(), static_cast<std::size_t>(std::ceil(total)) + 1);
  }
}

TEST(ApportionTest, LargestRemainder) {
  EXPECT_EQ(Apportion(10, std::vector<double>{1, 1, 1}), (std::vector<std::size_t>{4, 3, 3}));
  EXPECT_EQ(Apportion(7, std::vector<double>{2, 5}), (std::vector<std::size_t>{2, 5}));
  const auto a = Apportion(1001, std::vector<double>{0.3, 0.2, 0.5});
  EXPECT_EQ(a[0] + a[1] + a[2], 1001u);
}

TEST(BinaryRrMeanTest, ExactlyUnbiased) {
  const double eps = 0.8;
  const double e = std::exp(eps);
  const std::vector<double> theta{0.0, 0.25, 1.0};
  std::vector<double> ones(3), totals(3, 500.0);
  for (int j = 0; j < 3; ++j) ones[j] = 500.0 * (theta[j] * (e - 1) / (e + 1) + 1 / (e + 1));
  const std::vector<double> est = BinaryRrMeanEstimate(ones, totals, eps);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(est[j], theta[j], 1e-12);
}

TEST(TwoPhaseTest, OneSparseAndGroupSums) {
  const int d = 8;
  const double eps = 1.0;
  std::vector<double> theta(d, 1.0 / d);
  const std::size_t n = 100000;
  CounterRng data(5);
  BinaryMatrix samples(n, d);
  for (std::size_t k = 0; k < n; ++k) {
    for (int j = 0; j < d; ++j) samples.Row(k)[j] = data.Uniform() < theta[j];
  }
  CounterRng rng(6);
  const TwoPhaseResult r = TwoPhaseEstimate(samples, eps, TwoPhaseConfig{}, rng);
  EXPECT_GE(r.groups.size(), 1u);
  EXPECT_LE(r.groups.size(), 2u);
  bool success = true;
  for (int j = 0; j < d; ++j) success &= std::abs(r.coarse[j] - theta[j]) < 1.0 / d;
  if (success) {
    for (const auto& g : r.groups) {
      double sum = 0.0;
      for (int i : g) sum += theta[i];
      EXPECT_LE(sum, 3.0);
    }
  }
  EXPECT_EQ(r.theta_hat.size(), static_cast<std::size_t>(d));
  std::size_t total = std::accumulate(r.group_nodes.begin(), r.group_nodes.end(), std::size_t{0});
  EXPECT_EQ(total, n - static_cast<std::size_t>(n * 0.5));
}

TEST(TwoPhaseTest, ConfigValidation) {
  TwoPhaseConfig cfg;
  cfg.group_cap = 0.5;
  EXPECT_THROW(cfg.Validate(8), ConfigError);
  cfg.group_cap = 2.0;
  cfg.phase1_fraction = 0.0;
  EXPECT_THROW(cfg.Validate(8), ConfigError);
}

TEST(MeanRateTest, NoiselessExamples) {
  const int d = 6;
  const int k = 2;
  const std::vector<int> all_k(100, k);
  EXPECT_NEAR(EstimateMeanRate(all_k, d, k, 60.0), 1.0, 1e-12);
  std::vector<int> mixed(100, 0);
  std::fill(mixed.begin() + 50, mixed.end(), 2 * k);
  EXPECT_NEAR(EstimateMeanRate(mixed, d, k, 60.0), 1.5, 1e-12);
}

TEST(MeanRateTest, ExactExpectationUnderEnumeration) {
  const std::vector<double> theta{0.2, 0.3, 0.1};
  const int d = 3;
  const int k = 1;
  const std::vector<double> law = ProductLaw(theta);
  std::vector<double> norm_pmf(d + 1, 0.0);
  for (std::size_t x = 0; x < law.size(); ++x) norm_pmf[std::popcount(x)] += law[x];
  double expected = 0.0;
  for (int v = 0; v <= d; ++v) expected += std::max(v, k) / double(k) * norm_pmf[v];
  EXPECT_NEAR(ExactMeanRate(theta, k), expected, 1e-15);
  for (double eps : {0.3, 1.0, 4.0}) {
    const std::vector<double> out = PushForward(MakeKrr(d + 1, eps).Materialize(), norm_pmf);
    std::vector<double> counts(d + 1);
    for (int v = 0; v <= d; ++v) counts[v] = 100.0 * out[v];
    EXPECT_NEAR(EstimateMeanRate(counts, 100.0, k, eps, false), expected, 1e-12);
  }
}

TEST(SubsampleKrrEstimateTest, SingleReport) {
  SubsampleAggregatorState state;
  state.a = 0.7;
  state.b = 0.1;
  const std::vector<std::vector<int>> reports{{1}};
  const std::vector<double> est = SubsampleKrrEstimate(reports, 3, state);
  EXPECT_NEAR(est[1], 9.0 / 7, 1e-15);
  EXPECT_NEAR(est[0], -1.0 / 7, 1e-15);
  EXPECT_NEAR(est[2], -1.0 / 7, 1e-15);
  state.mu_r = {1.0, 1.0};
  EXPECT_THROW(SubsampleKrrEstimate(reports, 3, state), DimensionMismatchError);
}

TEST(SubsampleKrrEstimateTest, ExactlyUnbiasedWithTrueRates) {
  const double eps = std::log(8.0);
  for (int d = 2; d <= 4; ++d) {
    for (int k = 1; k <= d; ++k) {
      std::vector<double> theta(d);
      for (int j = 0; j < d; ++j) theta[j] = 0.1 + 0.07 * j;
      const SubsampleKrrChannel channel = SubsampleKrrChannel::WithK(d, k, eps);
      const std::vector<double> out = PushForward(channel.Materialize(), ProductLaw(theta));
      std::vector<double> counts(d, 0.0);
      for (std::size_t y = 0; y < out.size(); ++y) {
        for (int i : UnrankSparseSupport(y, d)) counts[i] += 1000.0 * out[y];
      }
      SubsampleAggregatorState state;
      state.a = channel.a();
      state.b = channel.b();
      state.mu_r = ExactCoordinateRates(theta, k);
      const std::vector<double> est = SubsampleKrrEstimate(counts, 1000.0, state);
      for (int j = 0; j < d; ++j) EXPECT_NEAR(est[j], theta[j], 1e-10) << d << k << j;
    }
  }
}

TEST(GaussianMeanTest, SymmetryAndLimit) {
  const int d = 2;
  const std::size_t n = 200000;
  CounterRng data(9);
  std::vector<double> samples(n * d);
  for (double& v : samples) v = data.Normal();
  CounterRng rng(10);
  const std::vector<double> est = GaussianMeanEstimate(samples, d, 1.0, 2.0, rng);
  const double e = std::exp(1.0);
  const double se = 2.0 * (e + 1) / (e - 1) / std::sqrt(n / 2.0);
  for (double v : est) EXPECT_NEAR(v, 0.0, 3 * se);
  std::vector<double> constant(n * d, 0.4);
  const std::vector<double> sharp = GaussianMeanEstimate(constant, d, 50.0, 1.0, rng);
  for (double v : sharp) EXPECT_NEAR(v, 0.4, 3 / std::sqrt(n / 2.0));
  std::vector<double> wide(n * d, 5.0);
  for (double v : GaussianMeanEstimate(wide, d, 50.0, 1.0, rng)) EXPECT_NEAR(v, 1.0, 1e-9);
  EXPECT_THROW(GaussianMeanEstimate(samples, d, 0.0, 1.0, rng), ArgumentDomainError);
  EXPECT_THROW(GaussianMeanEstimate(samples, d, 1.0, 0.0, rng), ArgumentDomainError);
}

}  // namespace
}  // namespace ldpfisher
