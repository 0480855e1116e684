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

#ifndef LDPFISHER_CHANNELS_H_
#define LDPFISHER_CHANNELS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ldpfisher/random.h"

namespace ldpfisher {

// Largest output alphabet that may be materialized as a dense kernel.
inline constexpr std::uint64_t kMaterializationCap = 100000;

// Row-stochastic kernel Q(y|x) over finite alphabets with a certified
// privacy level. eps_nominal = +inf admits non-private kernels (identity).
class FiniteChannel {
 public:
  // Throws NonStochasticKernelError for negative entries, rows not summing
  // to 1 within 1e-12 or all-zero columns; PrivacyViolationError when the
  // kernel's likelihood ratios exceed exp(eps_nominal).
  FiniteChannel(std::size_t nx, std::size_t ny, std::vector<double> kernel,
                double eps_nominal, std::string label = "");

  // eps_nominal set to the kernel's own validate_eps value.
  static FiniteChannel Certified(std::size_t nx, std::size_t ny,
                                 std::vector<double> kernel,
                                 std::string label = "");

  std::size_t input_size() const { return nx_; }
  std::size_t output_size() const { return ny_; }
  double eps_nominal() const { return eps_; }
  const std::string& label() const { return label_; }
  const std::vector<double>& kernel() const { return kernel_; }

  double operator()(std::size_t x, std::size_t y) const {
    return kernel_[x * ny_ + y];
  }
  std::span<const double> Row(std::size_t x) const {
    return {kernel_.data() + x * ny_, ny_};
  }

  std::size_t Sample(std::size_t x, CounterRng& rng) const;

 private:
  std::size_t nx_;
  std::size_t ny_;
  std::vector<double> kernel_;
  double eps_;
  std::string label_;
};

// Minimal eps with every column ratio <= e^eps; +inf when a column mixes
// zero and nonzero entries. All-zero columns are ignored.
double ValidateEpsKernel(std::size_t nx, std::size_t ny,
                         std::span<const double> kernel);
double ValidateEps(const FiniteChannel& channel);

// Output law of the channel for an input distribution.
std::vector<double> PushForward(const FiniteChannel& channel,
                                std::span<const double> input_dist);

FiniteChannel IdentityChannel(std::size_t n);
FiniteChannel UniformChannel(std::size_t nx, std::size_t ny);

// Random kernel with validate_eps <= eps (fuzzing generator).
FiniteChannel RandomLdpChannel(std::size_t nx, std::size_t ny, double eps,
                               CounterRng& rng);

enum class StructuredKind { kKrr, kYeBarg, kSubsampleKrr };

// Mechanism with a lazy sampler and an optional dense kernel. Symbols are
// indices into the materialized alphabets.
class StructuredChannel {
 public:
  virtual ~StructuredChannel() = default;
  virtual StructuredKind kind() const = 0;
  virtual double eps() const = 0;
  virtual std::uint64_t input_size() const = 0;
  virtual std::uint64_t output_size() const = 0;
  virtual std::uint64_t SampleSymbol(std::uint64_t x,
                                     CounterRng& rng) const = 0;
  // Throws CapExceededError when the output alphabet exceeds the cap.
  virtual FiniteChannel Materialize() const = 0;
  bool Materializable() const;
};

// k-ary randomized response.
class KrrChannel : public StructuredChannel {
 public:
  KrrChannel(int k, double eps);

  StructuredKind kind() const override { return StructuredKind::kKrr; }
  double eps() const override { return eps_; }
  std::uint64_t input_size() const override { return static_cast<std::uint64_t>(k_); }
  std::uint64_t output_size() const override { return static_cast<std::uint64_t>(k_); }
  std::uint64_t SampleSymbol(std::uint64_t x, CounterRng& rng) const override;
  FiniteChannel Materialize() const override;

  int k() const { return k_; }
  double keep_probability() const { return keep_; }
  double other_probability() const { return other_; }
  int Sample(int x, CounterRng& rng) const {
    return static_cast<int>(SampleSymbol(static_cast<std::uint64_t>(x), rng));
  }

 private:
  int k_;
  double eps_;
  double keep_;
  double other_;
};

KrrChannel MakeKrr(int k, double eps);
KrrChannel MakeBinaryRr(double eps);

// Subset mechanism: category i maps to a weight-w indicator vector y with
// Q(y|i) proportional to e^eps when y_i = 1 and to 1 otherwise. Outputs
// are ordered by colexicographic rank of their index sets.
class YeBargChannel : public StructuredChannel {
 public:
  YeBargChannel(int d, int w, double eps);

  StructuredKind kind() const override { return StructuredKind::kYeBarg; }
  double eps() const override { return eps_; }
  std::uint64_t input_size() const override { return static_cast<std::uint64_t>(d_); }
  std::uint64_t output_size() const override;
  std::uint64_t SampleSymbol(std::uint64_t x, CounterRng& rng) const override;
  FiniteChannel Materialize() const override;

  int d() const { return d_; }
  int w() const { return w_; }
  // Probability that the input category is in the released subset.
  double include_probability() const { return include_; }
  // Kernel values Q(y|i) for y containing i and for y not containing i.
  double high() const { return high_; }
  double low() const { return low_; }

  // Released index set, sorted.
  std::vector<int> Sample(int x, CounterRng& rng) const;
  // Appends the released indices (unsorted) to `out` after clearing it.
  void SampleInto(int x, CounterRng& rng, std::vector<int>& out) const;

 private:
  int d_;
  int w_;
  double eps_;
  double include_;
  double high_;
  double low_;
};

YeBargChannel MakeYeBarg(int d, int w, double eps);

struct SubsampleResult {
  std::vector<std::uint8_t> kept;
  double rate;  // R = max(|x|_1, k) / k
};

// Keeps at most k ones of x, uniformly at random.
SubsampleResult Subsample(std::span<const std::uint8_t> x, int k,
                          CounterRng& rng);
// Same on a support list; reorders `support` so the kept indices come first
// and returns how many are kept.
int SubsampleSupport(std::vector<int>& support, int k, CounterRng& rng);

struct KSelection {
  int k;
  std::uint64_t support_size;  // N = sum_{i<=k} C(d, i)
  double p_e;                  // (N-1) / (N-1 + e^eps)
  double log_limit;            // eps - slack log d
};

// Largest k with sum_{i<=k} C(d,i) <= exp(eps - slack log d).
KSelection SelectK(int d, double eps, double slack = 10.0);

struct AffineMarginal {
  double a;
  double b;
};

// Constants with P(Y(i)=1 | x~) = A x~(i) + B for k-RR over the <=k-sparse
// binary vectors of length d.
AffineMarginal ComputeAb(int d, int k, double eps);

// Subsample to <= k ones, then k-RR over the N <= k-sparse vectors. Inputs
// are bit patterns of {0,1}^d, outputs are ranks of sparse supports.
class SubsampleKrrChannel : public StructuredChannel {
 public:
  SubsampleKrrChannel(int d, double eps, double slack);
  static SubsampleKrrChannel WithK(int d, int k, double eps);

  StructuredKind kind() const override { return StructuredKind::kSubsampleKrr; }
  double eps() const override { return eps_; }
  std::uint64_t input_size() const override;
  std::uint64_t output_size() const override { return support_size_; }
  std::uint64_t SampleSymbol(std::uint64_t x, CounterRng& rng) const override;
  FiniteChannel Materialize() const override;

  int d() const { return d_; }
  int k() const { return k_; }
  double p_e() const { return p_e_; }
  double a() const { return ab_.a; }
  double b() const { return ab_.b; }

  // Privatizes an already subsampled support (sorted, size <= k) and writes
  // the released support, sorted, into `out`.
  void PrivatizeSupport(std::span<const int> kept, CounterRng& rng,
                        std::vector<int>& out) const;
  // Full pipeline on a binary vector; returns the released support.
  std::vector<int> Sample(std::span<const std::uint8_t> x, CounterRng& rng,
                          double* rate = nullptr) const;

 private:
  SubsampleKrrChannel(int d, int k, double eps, int /*tag*/);

  int d_;
  int k_;
  double eps_;
  std::uint64_t support_size_;
  double p_e_;
  AffineMarginal ab_;
};

SubsampleKrrChannel MakeSubsampleKrr(int d, double eps, double slack = 10.0);

}  // namespace ldpfisher

#endif  // LDPFISHER_CHANNELS_H_
