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

#include "ldpfisher/combinatorics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldpfisher/errors.h"

namespace ldpfisher {

double Binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return c < 9.0e15 ? std::round(c) : c;
}

namespace {

constexpr int kTableRows = 68;

std::uint64_t ExactBinomial(int n, int k) {
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(c);
}

const std::vector<std::uint64_t>& BinomialTable() {
  static const std::vector<std::uint64_t> table = [] {
    std::vector<std::uint64_t> t(kTableRows * kTableRows, 0);
    for (int n = 0; n < kTableRows; ++n) {
      for (int k = 0; k <= n; ++k) t[n * kTableRows + k] = ExactBinomial(n, k);
    }
    return t;
  }();
  return table;
}

}  // namespace

std::uint64_t BinomialU64(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (n < kTableRows) return BinomialTable()[n * kTableRows + k];
  return ExactBinomial(n, k);
}

std::uint64_t RankSubset(std::span<const int> sorted_indices) {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < sorted_indices.size(); ++i) {
    rank += BinomialU64(sorted_indices[i], static_cast<int>(i) + 1);
  }
  return rank;
}

std::vector<int> UnrankSubset(std::uint64_t rank, int n, int w) {
  if (w < 0 || w > n) throw ArgumentDomainError("UnrankSubset: bad size");
  if (rank >= BinomialU64(n, w)) {
    throw ArgumentDomainError("UnrankSubset: rank out of range");
  }
  std::vector<int> out(static_cast<std::size_t>(w));
  int c = n - 1;
  for (int i = w; i >= 1; --i) {
    while (BinomialU64(c, i) > rank) --c;
    out[static_cast<std::size_t>(i - 1)] = c;
    rank -= BinomialU64(c, i);
    --c;
  }
  return out;
}

std::uint64_t SparseSupportCount(int n, int k) {
  std::uint64_t total = 0;
  for (int i = 0; i <= std::min(k, n); ++i) total += BinomialU64(n, i);
  return total;
}

std::uint64_t RankSparseSupport(std::span<const int> sorted_indices, int n) {
  const int size = static_cast<int>(sorted_indices.size());
  return SparseSupportCount(n, size - 1) + RankSubset(sorted_indices);
}

std::vector<int> UnrankSparseSupport(std::uint64_t rank, int n) {
  int size = 0;
  while (size <= n) {
    const std::uint64_t block = BinomialU64(n, size);
    if (rank < block) return UnrankSubset(rank, n, size);
    rank -= block;
    ++size;
  }
  throw ArgumentDomainError("UnrankSparseSupport: rank out of range");
}

void SampleDistinct(int n, int m, int excluded, CounterRng& rng,
                    std::vector<int>& out) {
  // Work in the compressed range {0..pool-1}, then skip `excluded`.
  const int pool = excluded >= 0 ? n - 1 : n;
  if (m < 0 || m > pool) throw ArgumentDomainError("SampleDistinct: m");
  const std::size_t start = out.size();
  for (int j = pool - m; j < pool; ++j) {
    const int t = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(j) + 1));
    bool seen = false;
    for (std::size_t i = start; i < out.size(); ++i) {
      if (out[i] == t) {
        seen = true;
        break;
      }
    }
    out.push_back(seen ? j : t);
  }
  if (excluded >= 0) {
    for (std::size_t i = start; i < out.size(); ++i) {
      if (out[i] >= excluded) ++out[i];
    }
  }
}

}  // namespace ldpfisher
