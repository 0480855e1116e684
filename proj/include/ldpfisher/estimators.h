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

#ifndef LDPFISHER_ESTIMATORS_H_
#define LDPFISHER_ESTIMATORS_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ldpfisher/channels.h"
#include "ldpfisher/estimator_spec.h"
#include "ldpfisher/random.h"

namespace ldpfisher {

// n x d matrix of bits, row-major.
struct BinaryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  BinaryMatrix() = default;
  BinaryMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}
  std::span<const std::uint8_t> Row(std::size_t i) const {
    return {bits.data() + i * cols, cols};
  }
  std::span<std::uint8_t> Row(std::size_t i) { return {bits.data() + i * cols, cols}; }
};

// One privatized message: the node, the protocol phase and the released
// symbol (subset rank, category or support rank depending on the mechanism).
struct ReportRecord {
  std::uint64_t node = 0;
  int phase = 0;
  std::uint64_t symbol = 0;
};

// round(d / (e^eps + 1)) clamped to [1, d-1]; 1 when e^eps >= d.
int ChooseW(int d, double eps);

// Affine inverse of the subset mechanism's per-coordinate marginal
// P(i in Y) = a p_i + b (1 - p_i).
AffineEstimatorSpec YeBargEstimatorSpec(int d, int w, double eps);

// p_hat_i = slope * T_i / n - intercept from subset reports.
std::vector<double> YeBargEstimate(std::span<const std::vector<int>> reports,
                                   int d, int w, double eps);
std::vector<double> YeBargEstimateFromCounts(std::span<const double> counts,
                                             double n, int d, int w,
                                             double eps);

// Closed-form E||p_hat - p||^2 of the subset estimator.
double YeBargRiskFormula(int d, int w, double eps, double n, double sum_p_sq);

// Frequency inversion for k-RR: (T_i/n - q_other) / (q_keep - q_other).
std::vector<double> KrrFrequencyEstimate(std::span<const double> counts,
                                         double n, int k, double eps);

// (1 - 1/sqrt 2) / exp(1 - 1/sqrt 2).
inline const double kPsFloor =
    (1.0 - 1.0 / std::sqrt(2.0)) / std::exp(1.0 - 1.0 / std::sqrt(2.0));

struct SparsePipelineConfig {
  bool halving = true;
  double split = 0.5;
  double floor = kPsFloor;
  void Validate() const;
};

// Exact reduction probabilities: p_i = P(f(X) = i) over the (possibly
// halved) coordinates and P_S = P(X = 0).
struct ReductionLaw {
  std::vector<double> p;
  double p_s = 1.0;
};
ReductionLaw ReductionProbabilities(std::span<const double> theta,
                                   bool halving);
// Inverse of ReductionProbabilities.
std::vector<double> ThetaFromReduction(std::span<const double> p, double p_s,
                                       bool halving);

// Product-Bernoulli estimation through the single-one reduction: the first
// part of the nodes report f(X) through the subset mechanism on d'+1
// categories, the rest report g(X) = 1{X = 0} through the 2-category one.
class SparseBernoulliPipeline {
 public:
  struct Tally {
    std::vector<double> counts_f;  // d' + 1 categories
    double n_f = 0.0;
    std::vector<double> counts_g;  // {X = 0, X != 0}
    double n_g = 0.0;
  };

  SparseBernoulliPipeline(int d, double eps, SparsePipelineConfig cfg = {});

  int d() const { return d_; }
  int reduced_dim() const { return reduced_; }
  int w() const { return f_channel_.w(); }
  double eps() const { return eps_; }
  const SparsePipelineConfig& config() const { return cfg_; }
  std::size_t FirstPhaseCount(std::size_t n) const;

  // Node side. Both apply the halving map first when enabled.
  int ReduceF(std::span<const std::uint8_t> x, CounterRng& rng) const;
  int ReduceG(std::span<const std::uint8_t> x, CounterRng& rng) const;
  void ReportF(std::span<const std::uint8_t> x, CounterRng& rng,
               std::vector<int>& subset) const;
  int ReportG(std::span<const std::uint8_t> x, CounterRng& rng) const;

  // Aggregator side.
  Tally NewTally() const;
  void AddF(Tally& tally, std::span<const int> subset) const;
  void AddG(Tally& tally, int category) const;
  // phase 0 symbols are subset ranks over d'+1 categories, phase 1 symbols
  // are categories {0, 1}.
  void AddRecord(Tally& tally, const ReportRecord& record) const;

  std::vector<double> EstimateP(const Tally& tally) const;  // truncated at 0
  double EstimatePs(const Tally& tally) const;              // floored
  std::vector<double> Estimate(const Tally& tally) const;

  // Runs all nodes: the first FirstPhaseCount(n) rows report f.
  std::vector<double> Run(const BinaryMatrix& samples, CounterRng& rng) const;

 private:
  void Halve(std::span<const std::uint8_t> x, CounterRng& rng,
             std::vector<std::uint8_t>& out) const;

  int d_;
  double eps_;
  SparsePipelineConfig cfg_;
  int reduced_;
  YeBargChannel f_channel_;
  YeBargChannel g_channel_;
};

std::vector<double> SparseBernoulliEstimate(const BinaryMatrix& samples,
                                            double eps,
                                            const SparsePipelineConfig& cfg,
                                            CounterRng& rng);

// Next-fit-decreasing packing: indices in decreasing order of theta_hat
// fill the open group until the next one would push its sum above cap.
std::vector<std::vector<int>> GroupParams(std::span<const double> theta_hat,
                                          double cap);

struct TwoPhaseConfig {
  double phase1_fraction = 0.5;
  double group_cap = 2.0;
  double precision = 0.0;  // 0 selects 1/d
  SparsePipelineConfig sparse;
  void Validate(int d) const;
};

struct TwoPhaseResult {
  std::vector<double> theta_hat;
  std::vector<double> coarse;
  std::vector<std::vector<int>> groups;
  std::vector<int> repetitions;
  std::vector<std::size_t> group_nodes;
};

// Binary-RR mean estimate per coordinate from ones/total counts.
std::vector<double> BinaryRrMeanEstimate(std::span<const double> ones,
                                         std::span<const double> totals,
                                         double eps);

// Phase 1 coarse estimates by per-coordinate binary RR, grouping, then the
// sparse pipeline per group on the remaining nodes.
TwoPhaseResult TwoPhaseEstimate(const BinaryMatrix& samples, double eps,
                                const TwoPhaseConfig& cfg, CounterRng& rng);

// Largest-remainder apportionment of total among weights.
std::vector<std::size_t> Apportion(std::size_t total,
                                   std::span<const double> weights);

struct SubsampleAggregatorState {
  double a = 1.0;
  double b = 0.0;
  // Per-coordinate debiasing scale; a single entry is broadcast.
  std::vector<double> mu_r{1.0};
  std::size_t m = 0;
};

// k-RR inversion over the d+1 values of ||X||_1.
std::vector<double> NormPmfEstimate(std::span<const double> bucket_counts,
                                    double m, double eps);
// sum_v max(v,k)/k pmf_hat(v), optionally clamped at 1.
double EstimateMeanRate(std::span<const double> bucket_counts, double m, int k,
                        double eps, bool clamp = true);
double EstimateMeanRate(std::span<const int> bucket_reports, int d, int k,
                        double eps);
// sum_v v pmf_hat(v) / sum_v min(v,k) pmf_hat(v), clamped at 1.
double EstimateKeptRate(std::span<const double> bucket_counts, double m, int k,
                        double eps);

// E[R] and E[R | X~(i) = 1] = theta_i / E[X~(i)] for product Bernoulli.
double ExactMeanRate(std::span<const double> theta, int k);
std::vector<double> ExactCoordinateRates(std::span<const double> theta, int k);

// theta_hat_i = mu_i (T_i / n - B) / A.
std::vector<double> SubsampleKrrEstimate(std::span<const double> coord_counts,
                                         double n,
                                         const SubsampleAggregatorState& state);
std::vector<double> SubsampleKrrEstimate(
    std::span<const std::vector<int>> reports, int d,
    const SubsampleAggregatorState& state);

// Node k handles coordinate k mod d: clip to [-c, c], release
// Bernoulli((1 + x/c)/2) through binary RR.
std::vector<double> GaussianMeanEstimate(std::span<const double> samples,
                                         int d, double eps, double clip,
                                         CounterRng& rng);

}  // namespace ldpfisher

#endif  // LDPFISHER_ESTIMATORS_H_
