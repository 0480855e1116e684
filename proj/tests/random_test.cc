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

#include "ldpfisher/random.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace ldpfisher {
namespace {

TEST(CounterRngTest, SameKeyAndCounterGiveSameStream) {
  CounterRng a(42);
  CounterRng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRngTest, ResumesFromCounter) {
  CounterRng a(7);
  for (int i = 0; i < 10; ++i) a();
  CounterRng b(7, a.counter());
  EXPECT_EQ(a(), b());
}

TEST(CounterRngTest, TrialStreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t row = 0; row < 4; ++row) {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
      CounterRng rng = CounterRng::ForTrial(1, row, trial);
      firsts.insert(rng());
    }
  }
  EXPECT_EQ(firsts.size(), 200u);
}

TEST(CounterRngTest, UniformIntStaysInRangeAndIsBalanced) {
  CounterRng rng(3);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const auto v = rng.UniformInt(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  // Each bin is Binomial(70000, 1/7): sd ~ 92.6.
  for (int c : counts) EXPECT_NEAR(c, 10000, 5 * 92.6);
}

TEST(CounterRngTest, UniformAndNormalMoments) {
  CounterRng rng(11);
  const int draws = 200000;
  double sum_u = 0.0;
  double sum_z = 0.0;
  double sum_z2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum_u += u;
    const double z = rng.Normal();
    sum_z += z;
    sum_z2 += z * z;
  }
  EXPECT_NEAR(sum_u / draws, 0.5, 5 * std::sqrt(1.0 / 12 / draws));
  EXPECT_NEAR(sum_z / draws, 0.0, 5 / std::sqrt(draws));
  EXPECT_NEAR(sum_z2 / draws, 1.0, 5 * std::sqrt(2.0 / draws));
}

TEST(CounterRngTest, SplitStreamsAreIndependentOfParentProgress) {
  CounterRng parent(5);
  const CounterRng child_before = parent.Split(1);
  parent();
  const CounterRng child_after = parent.Split(1);
  CounterRng a = child_before;
  CounterRng b = child_after;
  EXPECT_EQ(a(), b());
}

}  // namespace
}  // namespace ldpfisher
