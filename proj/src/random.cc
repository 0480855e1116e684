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
#include <numbers>

namespace ldpfisher {

std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng CounterRng::ForTrial(std::uint64_t seed, std::uint64_t row,
                                std::uint64_t trial) {
  std::uint64_t k = Mix64(seed ^ 0x6a09e667f3bcc909ULL);
  k = Mix64(k ^ (row * 0xd1b54a32d192ed03ULL + 1));
  k = Mix64(k ^ (trial * 0x8cb92ba72f3d8dd7ULL + 2));
  return CounterRng(k);
}

std::uint64_t CounterRng::UniformInt(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = (*this)();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::Normal() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::Split(std::uint64_t stream) const {
  return CounterRng(Mix64(key_ ^ Mix64(stream + 0x243f6a8885a308d3ULL)));
}

}  // namespace ldpfisher
