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

#ifndef LDPFISHER_COMBINATORICS_H_
#define LDPFISHER_COMBINATORICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ldpfisher/random.h"

namespace ldpfisher {

// C(n, k) in floating point (0 when k < 0 or k > n).
double Binomial(int n, int k);

// C(n, k) exactly; saturates to UINT64_MAX on overflow.
std::uint64_t BinomialU64(int n, int k);

// Colexicographic rank of a strictly increasing index set.
std::uint64_t RankSubset(std::span<const int> sorted_indices);

// Inverse of RankSubset for subsets of size w drawn from {0, ..., n-1}.
std::vector<int> UnrankSubset(std::uint64_t rank, int n, int w);

// Rank of a set of at most k indices out of n: sets are ordered by size,
// then colexicographically. The empty set has rank 0.
std::uint64_t RankSparseSupport(std::span<const int> sorted_indices, int n);
std::vector<int> UnrankSparseSupport(std::uint64_t rank, int n);

// Number of subsets of {0..n-1} with size at most k.
std::uint64_t SparseSupportCount(int n, int k);

// Appends m distinct indices drawn uniformly from {0..n-1} \ {excluded}
// (pass excluded = -1 for none). Floyd's algorithm, O(m^2) membership.
void SampleDistinct(int n, int m, int excluded, CounterRng& rng,
                    std::vector<int>& out);

}  // namespace ldpfisher

#endif  // LDPFISHER_COMBINATORICS_H_
