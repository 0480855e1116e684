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

#include "ldpfisher/channels.h"

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include <gtest/gtest.h>

#include "ldpfisher/combinatorics.h"
#include "ldpfisher/errors.h"

namespace ldpfisher {
namespace {

// Every cell of the empirical output law within 4 standard errors of the
// kernel row.
void ExpectSamplerMatchesKernel(const StructuredChannel& channel,
                                std::uint64_t x, int draws,
                                std::uint64_t seed) {
  const FiniteChannel kernel = channel.Materialize();
  CounterRng rng(seed);
  std::vector<double> counts(kernel.output_size(), 0.0);
  for (int i = 0; i < draws; ++i) counts[channel.SampleSymbol(x, rng)] += 1.0;
  for (std::size_t y = 0; y < counts.size(); ++y) {
    const double p = kernel(x, y);
    const double sd = std::sqrt(draws * p * (1 - p));
    EXPECT_NEAR(counts[y], draws * p, 4 * sd + 1e-9) << "x=" << x << " y=" << y;
  }
}

TEST(ValidateEpsTest, ReferenceKernels) {
  EXPECT_DOUBLE_EQ(ValidateEps(UniformChannel(3, 4)), 0.0);
  EXPECT_TRUE(std::isinf(ValidateEps(IdentityChannel(3))));
  const FiniteChannel rr(2, 2, {0.75, 0.25, 0.25, 0.75}, std::log(3.0));
  EXPECT_NEAR(ValidateEps(rr), std::log(3.0), 1e-12);
}

TEST(FiniteChannelTest, RejectsInvalidKernels) {
  EXPECT_THROW(FiniteChannel(2, 2, {0.5, 0.6, 0.5, 0.5}, 1.0), NonStochasticKernelError);
  EXPECT_THROW(FiniteChannel(2, 2, {1.2, -0.2, 0.5, 0.5}, 1.0), NonStochasticKernelError);
  EXPECT_THROW(FiniteChannel(2, 2, {1.0, 0.0, 1.0, 0.0}, 1.0), NonStochasticKernelError);
  EXPECT_THROW(FiniteChannel(2, 2, {0.9, 0.1, 0.1, 0.9}, 1.0), PrivacyViolationError);
  EXPECT_THROW(FiniteChannel(2, 2, {1.0, 0.0, 0.5, 0.5}, 5.0), PrivacyViolationError);
  EXPECT_THROW(FiniteChannel(2, 3, {0.5, 0.5}, 1.0), DimensionMismatchError);
}

TEST(KrrTest, KernelValues) {
  const FiniteChannel channel = MakeKrr(4, std::log(3.0)).Materialize();
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 4; ++y) {
      EXPECT_NEAR(channel(x, y), x == y ? 0.5 : 1.0 / 6, 1e-15);
    }
  }
  const FiniteChannel tiny = MakeKrr(2, 1e-12).Materialize();
  EXPECT_NEAR(tiny(0, 0), 0.5, 1e-12);
  EXPECT_THROW(MakeKrr(1, 1.0), ArgumentDomainError);
  EXPECT_THROW(MakeKrr(3, -1.0), ArgumentDomainError);
}

TEST(KrrTest, CertifiedAtItsLevel) {
  for (int k : {2, 3, 7, 20}) {
    for (double eps : {0.1, 0.5, 1.0, 3.0, 8.0}) {
      EXPECT_NEAR(ValidateEps(MakeKrr(k, eps).Materialize()), eps, 1e-12);
    }
  }
}

TEST(KrrTest, SamplerMatchesKernel) {
  const KrrChannel channel = MakeKrr(5, 1.0);
  for (std::uint64_t x = 0; x < 5; ++x) ExpectSamplerMatchesKernel(channel, x, 100000, 20 + x);
}

TEST(BinaryRrTest, KernelAndMarginal) {
  const FiniteChannel channel = MakeBinaryRr(std::log(3.0)).Materialize();
  EXPECT_NEAR(channel(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(channel(0, 1), 0.25, 1e-15);
  const double eps = 1.3;
  const FiniteChannel rr = MakeBinaryRr(eps).Materialize();
  for (double theta : {0.1, 0.4, 0.9}) {
    const std::vector<double> out = PushForward(rr, std::vector<double>{1 - theta, theta});
    const double e = std::exp(eps);
    EXPECT_NEAR(out[1], theta * (e - 1) / (e + 1) + 1 / (e + 1), 1e-15);
  }
  const FiniteChannel flat = MakeBinaryRr(0.0).Materialize();
  EXPECT_DOUBLE_EQ(flat(0, 0), flat(1, 0));
  EXPECT_DOUBLE_EQ(flat(0, 1), flat(1, 1));
}

TEST(YeBargTest, KernelValues) {
  const FiniteChannel channel = MakeYeBarg(3, 1, std::log(2.0)).Materialize();
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) {
      // Outputs are the singletons {0}, {1}, {2} in colex order.
      EXPECT_NEAR(channel(x, y), x == y ? 0.5 : 0.25, 1e-15);
    }
  }
}

TEST(YeBargTest, CertifiedAtItsLevelForAllSmallShapes) {
  for (int d = 2; d <= 6; ++d) {
    for (int w = 1; w < d; ++w) {
      for (double eps : {0.1, 1.0, 4.0}) {
        EXPECT_NEAR(ValidateEps(MakeYeBarg(d, w, eps).Materialize()), eps, 1e-12)
            << "d=" << d << " w=" << w;
      }
    }
  }
}

TEST(YeBargTest, SamplerMatchesKernel) {
  const YeBargChannel channel = MakeYeBarg(4, 2, 1.0);
  for (std::uint64_t x = 0; x < 4; ++x) {
    ExpectSamplerMatchesKernel(channel, x, 1000000, 40 + x);
  }
}

TEST(YeBargTest, OutputSizeAndDomain) {
  EXPECT_EQ(MakeYeBarg(6, 3, 1.0).output_size(), 20u);
  EXPECT_THROW(MakeYeBarg(4, 4, 1.0), ArgumentDomainError);
  EXPECT_THROW(MakeYeBarg(4, 0, 1.0), ArgumentDomainError);
  EXPECT_THROW(MakeYeBarg(40, 20, 1.0).Materialize(), CapExceededError);
}

TEST(SubsampleTest, Cases) {
  CounterRng rng(1);
  const std::vector<std::uint8_t> one{0, 1, 0, 0};
  SubsampleResult r = Subsample(one, 2, rng);
  EXPECT_EQ(r.kept, one);
  EXPECT_DOUBLE_EQ(r.rate, 1.0);
  const std::vector<std::uint8_t> five{1, 1, 1, 1, 1, 0};
  r = Subsample(five, 2, rng);
  EXPECT_EQ(std::accumulate(r.kept.begin(), r.kept.end(), 0), 2);
  for (std::size_t i = 0; i < five.size(); ++i) EXPECT_LE(r.kept[i], five[i]);
  EXPECT_DOUBLE_EQ(r.rate, 2.5);
  const std::vector<std::uint8_t> zero(5, 0);
  r = Subsample(zero, 3, rng);
  EXPECT_EQ(r.kept, zero);
  EXPECT_DOUBLE_EQ(r.rate, 1.0);
}

TEST(SubsampleTest, KeptOnesAreUniform) {
  CounterRng rng(2);
  const std::vector<std::uint8_t> x{1, 1, 0, 1, 1};
  std::vector<double> hits(5, 0.0);
  const int trials = 80000;
  for (int t = 0; t < trials; ++t) {
    const SubsampleResult r = Subsample(x, 1, rng);
    for (std::size_t i = 0; i < x.size(); ++i) hits[i] += r.kept[i];
  }
  const double sd = std::sqrt(trials * 0.25 * 0.75);
  for (std::size_t i : {0u, 1u, 3u, 4u}) EXPECT_NEAR(hits[i], trials / 4.0, 4 * sd);
  EXPECT_EQ(hits[2], 0.0);
}

TEST(SelectKTest, CumulativeBinomialExamples) {
  const KSelection a = SelectK(32, 45.0, 10.0);
  EXPECT_EQ(a.k, 3);
  EXPECT_EQ(a.support_size, 5489u);
  EXPECT_LE(5489.0, std::exp(45.0 - 10.0 * std::log(32.0)));
  EXPECT_GT(5489.0 + 35960.0, std::exp(45.0 - 10.0 * std::log(32.0)));
  EXPECT_LE(a.p_e, std::pow(32.0, -10.0));
  const KSelection b = SelectK(16, 12.0, 2.0);
  EXPECT_EQ(b.k, 2);
  EXPECT_EQ(b.support_size, 137u);
  const KSelection full = SelectK(2, 40.0, 10.0);
  EXPECT_EQ(full.k, 2);
  EXPECT_EQ(full.support_size, 4u);
  EXPECT_THROW(SelectK(32, 20.0, 10.0), InfeasiblePrivacyError);
}

TEST(ComputeAbTest, SmallExample) {
  const AffineMarginal ab = ComputeAb(2, 1, std::log(8.0));
  EXPECT_NEAR(ab.a, 0.7, 1e-15);
  EXPECT_NEAR(ab.b, 0.1, 1e-15);
  const AffineMarginal near = ComputeAb(5, 2, 60.0);
  EXPECT_NEAR(near.a, 1.0, 1e-12);
  EXPECT_NEAR(near.b, 0.0, 1e-12);
}

TEST(ComputeAbTest, AffineLawHoldsUnderEnumeration) {
  for (int d = 1; d <= 4; ++d) {
    for (int k = 1; k <= d; ++k) {
      for (double eps : {1.0, 2.0, std::log(8.0)}) {
        const SubsampleKrrChannel channel = SubsampleKrrChannel::WithK(d, k, eps);
        const FiniteChannel kernel = channel.Materialize();
        const AffineMarginal ab = ComputeAb(d, k, eps);
        for (std::size_t x = 0; x < kernel.input_size(); ++x) {
          if (std::popcount(x) > k) continue;
          for (int i = 0; i < d; ++i) {
            double p = 0.0;
            for (std::size_t y = 0; y < kernel.output_size(); ++y) {
              for (int j : UnrankSparseSupport(y, d)) {
                if (j == i) p += kernel(x, y);
              }
            }
            const double xi = (x >> i) & 1U;
            EXPECT_NEAR(p, ab.a * xi + ab.b, 1e-12)
                << "d=" << d << " k=" << k << " x=" << x << " i=" << i;
          }
        }
      }
    }
  }
}

TEST(SubsampleKrrTest, CertifiedAndMarginal) {
  const double eps = std::log(8.0);
  const SubsampleKrrChannel channel = SubsampleKrrChannel::WithK(3, 1, eps);
  const FiniteChannel kernel = channel.Materialize();
  EXPECT_EQ(kernel.output_size(), 4u);
  EXPECT_LE(ValidateEps(kernel), eps + 1e-12);
  // Affine marginal at theta = (0.2, 0.3, 0.1), with E[X~(i)] by enumeration.
  const std::vector<double> theta{0.2, 0.3, 0.1};
  std::vector<double> input(8, 0.0);
  for (std::size_t x = 0; x < 8; ++x) {
    input[x] = 1.0;
    for (int j = 0; j < 3; ++j) input[x] *= (x >> j) & 1U ? theta[j] : 1 - theta[j];
  }
  const std::vector<double> out = PushForward(kernel, input);
  for (int i = 0; i < 3; ++i) {
    double tilde = 0.0;
    for (std::size_t x = 0; x < 8; ++x) {
      if ((x >> i) & 1U) tilde += input[x] / std::max(1, std::popcount(x));
    }
    double p = 0.0;
    for (std::size_t y = 0; y < 4; ++y) {
      for (int j : UnrankSparseSupport(y, 3)) {
        if (j == i) p += out[y];
      }
    }
    EXPECT_NEAR(p, channel.a() * tilde + channel.b(), 1e-12);
  }
}

TEST(SubsampleKrrTest, FullSupportNearIdentity) {
  const SubsampleKrrChannel channel = SubsampleKrrChannel::WithK(2, 2, 20.0);
  const FiniteChannel kernel = channel.Materialize();
  for (std::size_t x = 0; x < 4; ++x) {
    std::vector<int> support;
    for (int j = 0; j < 2; ++j) {
      if ((x >> j) & 1U) support.push_back(j);
    }
    EXPECT_GE(kernel(x, RankSparseSupport(support, 2)), 1 - channel.p_e() - 1e-15);
  }
}

TEST(SubsampleKrrTest, SamplerMatchesKernel) {
  const SubsampleKrrChannel channel = SubsampleKrrChannel::WithK(4, 2, 3.0);
  for (std::uint64_t x : {0u, 5u, 7u, 15u}) ExpectSamplerMatchesKernel(channel, x, 200000, 60 + x);
}

TEST(RandomLdpChannelTest, CertifiedAndDegenerate) {
  CounterRng rng(5);
  for (int t = 0; t < 200; ++t) {
    const double eps = std::array<double, 5>{0.1, 0.5, 1.0, 2.0, 5.0}[t % 5];
    const FiniteChannel channel = RandomLdpChannel(2 + t % 5, 2 + t % 7, eps, rng);
    EXPECT_LE(ValidateEps(channel), eps + 1e-12);
  }
  const FiniteChannel flat = RandomLdpChannel(3, 4, 0.0, rng);
  for (std::size_t x = 1; x < 3; ++x) {
    for (std::size_t y = 0; y < 4; ++y) EXPECT_DOUBLE_EQ(flat(x, y), flat(0, y));
  }
}

TEST(PushForwardTest, ReferenceKernels) {
  const std::vector<double> p{0.2, 0.5, 0.3};
  EXPECT_EQ(PushForward(IdentityChannel(3), p), p);
  for (double q : PushForward(UniformChannel(3, 4), p)) EXPECT_NEAR(q, 0.25, 1e-15);
  const std::vector<double> out =
      PushForward(MakeBinaryRr(std::log(3.0)).Materialize(), std::vector<double>{0.5, 0.5});
  EXPECT_NEAR(out[0], 0.5, 1e-15);
  EXPECT_THROW(PushForward(IdentityChannel(2), p), DimensionMismatchError);
}

}  // namespace
}  // namespace ldpfisher
