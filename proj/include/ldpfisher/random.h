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

#ifndef LDPFISHER_RANDOM_H_
#define LDPFISHER_RANDOM_H_

#include <cstdint>
#include <limits>

namespace ldpfisher {

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t z);

// Counter-based generator: the i-th output is Mix64(key + i * golden). Any
// output can be recomputed from (key, counter), so streams derived from
// (seed, row, trial) are identical regardless of thread scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  // Substream for one trial of one sweep row.
  static CounterRng ForTrial(std::uint64_t seed, std::uint64_t row,
                             std::uint64_t trial);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    return Mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t UniformInt(std::uint64_t bound);

  // Standard normal via Box-Muller (one value per call, no caching).
  double Normal();

  // Independent child stream.
  CounterRng Split(std::uint64_t stream) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace ldpfisher

#endif  // LDPFISHER_RANDOM_H_
