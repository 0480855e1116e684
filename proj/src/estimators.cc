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
#include <cmath>
#include <numeric>
#include <string>

#include "ldpfisher/combinatorics.h"
#include "ldpfisher/errors.h"

namespace ldpfisher {
namespace {

void CheckPositiveEps(double eps) {
  if (!(eps > 0.0)) throw ArgumentDomainError("epsilon must be > 0");
}

// Poisson-binomial law of the number of ones among theta, skipping `skip`.
std::vector<double> OnesLaw(std::span<const double> theta, int skip) {
  std::vector<double> law{1.0};
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (static_cast<int>(j) == skip) continue;
    std::vector<double> next(law.size() + 1, 0.0);
    for (std::size_t v = 0; v < law.size(); ++v) {
      next[v] += law[v] * (1.0 - theta[j]);
      next[v + 1] += law[v] * theta[j];
    }
    law = std::move(next);
  }
  return law;
}

}  // namespace

int ChooseW(int d, double eps) {
  if (d < 2) throw ArgumentDomainError("choose_w needs d >= 2");
  CheckPositiveEps(eps);
  const double e = std::exp(eps);
  if (e >= d) return 1;
  const int w = static_cast<int>(std::lround(d / (e + 1.0)));
  return std::clamp(w, 1, d - 1);
}

AffineEstimatorSpec YeBargEstimatorSpec(int d, int w, double eps) {
  const YeBargChannel channel(d, w, eps);
  const double a = channel.include_probability();
  const double b = Binomial(d - 2, w - 2) * channel.high() +
                   Binomial(d - 2, w - 1) * channel.low();
  if (!(a > b)) throw ArgumentDomainError("subset mechanism is not informative");
  return {1.0 / (a - b), b / (a - b)};
}

std::vector<double> YeBargEstimateFromCounts(std::span<const double> counts,
                                             double n, int d, int w,
                                             double eps) {
  if (static_cast<int>(counts.size()) != d) {
    throw DimensionMismatchError("count vector must have d entries");
  }
  if (!(n > 0.0)) throw ArgumentDomainError("empty reports");
  const AffineEstimatorSpec spec = YeBargEstimatorSpec(d, w, eps);
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = spec.slope * counts[i] / n - spec.intercept;
  }
  return p;
}

std::vector<double> YeBargEstimate(std::span<const std::vector<int>> reports,
                                   int d, int w, double eps) {
  if (reports.empty()) throw ArgumentDomainError("empty reports");
  std::vector<double> counts(static_cast<std::size_t>(d), 0.0);
  for (const auto& report : reports) {
    if (static_cast<int>(report.size()) != w) {
      throw DimensionMismatchError("report does not have weight w");
    }
    for (int i : report) {
      if (i < 0 || i >= d) throw ArgumentDomainError("report index out of range");
      counts[static_cast<std::size_t>(i)] += 1.0;
    }
  }
  return YeBargEstimateFromCounts(counts, static_cast<double>(reports.size()),
                                  d, w, eps);
}

double YeBargRiskFormula(int d, int w, double eps, double n, double sum_p_sq) {
  if (d < 2 || w < 1 || w >= d) throw ArgumentDomainError("risk formula needs 1 <= w < d");
  CheckPositiveEps(eps);
  if (!(n > 0.0)) throw ArgumentDomainError("risk formula needs n > 0");
  const double e = std::exp(eps);
  const double em1_sq = std::expm1(eps) * std::expm1(eps);
  const double term1 = (w * (d - 2.0) + 1.0) * e * e / ((d - w) * em1_sq);
  const double term2 = 2.0 * (d - 2.0) * e / em1_sq;
  const double term3 = ((d - 2.0) * (d - w) + 1.0) / (w * em1_sq);
  return (term1 + term2 + term3 - sum_p_sq) / n;
}

std::vector<double> KrrFrequencyEstimate(std::span<const double> counts,
                                         double n, int k, double eps) {
  if (static_cast<int>(counts.size()) != k) {
    throw DimensionMismatchError("count vector must have k entries");
  }
  if (!(n > 0.0)) throw ArgumentDomainError("empty reports");
  const KrrChannel channel(k, eps);
  const double gap = channel.keep_probability() - channel.other_probability();
  if (!(gap > 0.0)) throw ArgumentDomainError("k-RR at eps = 0 is not invertible");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = (counts[i] / n - channel.other_probability()) / gap;
  }
  return p;
}

void SparsePipelineConfig::Validate() const {
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0, 1)");
  if (!(floor > 0.0 && floor < 1.0)) throw ConfigError("floor must lie in (0, 1)");
}

ReductionLaw ReductionProbabilities(std::span<const double> theta,
                                    bool halving) {
  const std::size_t d = theta.size();
  // z_j: probability that coordinate j (or pair j) is all zero.
  std::vector<double> z(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (!(theta[j] >= 0.0 && theta[j] <= 1.0)) {
      throw ArgumentDomainError("theta must lie in [0, 1]");
    }
    z[j] = halving ? 1.0 - 0.75 * theta[j] : 1.0 - theta[j];
  }
  std::vector<double> prefix(d + 1, 1.0);
  std::vector<double> suffix(d + 1, 1.0);
  for (std::size_t j = 0; j < d; ++j) prefix[j + 1] = prefix[j] * z[j];
  for (std::size_t j = d; j-- > 0;) suffix[j] = suffix[j + 1] * z[j];
  ReductionLaw law;
  law.p_s = prefix[d];
  law.p.resize(halving ? 2 * d : d);
  for (std::size_t i = 0; i < d; ++i) {
    const double others = prefix[i] * suffix[i + 1];
    if (halving) {
      law.p[2 * i] = law.p[2 * i + 1] = 0.25 * theta[i] * others;
    } else {
      law.p[i] = theta[i] * others;
    }
  }
  return law;
}

std::vector<double> ThetaFromReduction(std::span<const double> p, double p_s,
                                       bool halving) {
  if (halving && p.size() % 2 != 0) {
    throw DimensionMismatchError("halved reduction needs an even length");
  }
  const std::size_t d = halving ? p.size() / 2 : p.size();
  std::vector<double> theta(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    if (halving) {
      if (p_s <= 0.0) {
        theta[i] = p[2 * i] + p[2 * i + 1] > 0.0 ? 1.0 : 0.0;
        continue;
      }
      const double r = (p[2 * i] + p[2 * i + 1]) / p_s;
      theta[i] = 2.0 * r / (1.0 + 1.5 * r);
    } else {
      const double denom = p[i] + p_s;
      theta[i] = denom > 0.0 ? p[i] / denom : 0.0;
    }
    theta[i] = std::clamp(theta[i], 0.0, 1.0);
  }
  return theta;
}

SparseBernoulliPipeline::SparseBernoulliPipeline(int d, double eps,
                                                 SparsePipelineConfig cfg)
    : d_(d),
      eps_(eps),
      cfg_(cfg),
      reduced_(cfg.halving ? 2 * d : d),
      f_channel_(reduced_ + 1, ChooseW(reduced_ + 1, eps), eps),
      g_channel_(2, 1, eps) {
  if (d < 1) throw ArgumentDomainError("sparse pipeline needs d >= 1");
  CheckPositiveEps(eps);
  cfg_.Validate();
}

std::size_t SparseBernoulliPipeline::FirstPhaseCount(std::size_t n) const {
  if (n < 2) return n;
  const auto first = static_cast<std::size_t>(
      std::llround(cfg_.split * static_cast<double>(n)));
  return std::clamp<std::size_t>(first, 1, n - 1);
}

void SparseBernoulliPipeline::Halve(std::span<const std::uint8_t> x,
                                    CounterRng& rng,
                                    std::vector<std::uint8_t>& out) const {
  out.assign(static_cast<std::size_t>(reduced_), 0);
  for (int i = 0; i < d_; ++i) {
    if (!x[static_cast<std::size_t>(i)]) continue;
    const std::uint64_t r = rng();
    out[static_cast<std::size_t>(2 * i)] = r & 1U;
    out[static_cast<std::size_t>(2 * i + 1)] = (r >> 1) & 1U;
  }
}

int SparseBernoulliPipeline::ReduceF(std::span<const std::uint8_t> x,
                                     CounterRng& rng) const {
  if (static_cast<int>(x.size()) != d_) {
    throw DimensionMismatchError("sample has wrong length");
  }
  int ones = 0;
  int where = -1;
  if (cfg_.halving) {
    for (int i = 0; i < d_ && ones < 2; ++i) {
      if (!x[static_cast<std::size_t>(i)]) continue;
      const std::uint64_t r = rng();
      if (r & 1U) {
        ++ones;
        where = 2 * i;
      }
      if ((r >> 1) & 1U) {
        ++ones;
        where = 2 * i + 1;
      }
    }
  } else {
    for (int i = 0; i < d_ && ones < 2; ++i) {
      if (x[static_cast<std::size_t>(i)]) {
        ++ones;
        where = i;
      }
    }
  }
  return ones == 1 ? where : reduced_;
}

int SparseBernoulliPipeline::ReduceG(std::span<const std::uint8_t> x,
                                     CounterRng& rng) const {
  if (static_cast<int>(x.size()) != d_) {
    throw DimensionMismatchError("sample has wrong length");
  }
  for (int i = 0; i < d_; ++i) {
    if (!x[static_cast<std::size_t>(i)]) continue;
    if (!cfg_.halving) return 1;
    if (rng() & 3U) return 1;
  }
  return 0;
}

void SparseBernoulliPipeline::ReportF(std::span<const std::uint8_t> x,
                                      CounterRng& rng,
                                      std::vector<int>& subset) const {
  f_channel_.SampleInto(ReduceF(x, rng), rng, subset);
}

int SparseBernoulliPipeline::ReportG(std::span<const std::uint8_t> x,
                                     CounterRng& rng) const {
  std::vector<int> out;
  out.reserve(1);
  g_channel_.SampleInto(ReduceG(x, rng), rng, out);
  return out.front();
}

SparseBernoulliPipeline::Tally SparseBernoulliPipeline::NewTally() const {
  Tally tally;
  tally.counts_f.assign(static_cast<std::size_t>(reduced_) + 1, 0.0);
  tally.counts_g.assign(2, 0.0);
  return tally;
}

void SparseBernoulliPipeline::AddF(Tally& tally,
                                   std::span<const int> subset) const {
  for (int i : subset) tally.counts_f[static_cast<std::size_t>(i)] += 1.0;
  tally.n_f += 1.0;
}

void SparseBernoulliPipeline::AddG(Tally& tally, int category) const {
  tally.counts_g[static_cast<std::size_t>(category)] += 1.0;
  tally.n_g += 1.0;
}

void SparseBernoulliPipeline::AddRecord(Tally& tally,
                                        const ReportRecord& record) const {
  if (record.phase == 0) {
    if (record.symbol >= f_channel_.output_size()) {
      throw ConfigError("phase-0 symbol out of range");
    }
    AddF(tally, UnrankSubset(record.symbol, reduced_ + 1, f_channel_.w()));
  } else if (record.phase == 1) {
    if (record.symbol > 1) throw ConfigError("phase-1 symbol must be 0 or 1");
    AddG(tally, static_cast<int>(record.symbol));
  } else {
    throw ConfigError("sparse pipeline phases are 0 and 1");
  }
}

std::vector<double> SparseBernoulliPipeline::EstimateP(
    const Tally& tally) const {
  std::vector<double> p(static_cast<std::size_t>(reduced_), 0.0);
  if (tally.n_f <= 0.0) return p;
  const std::vector<double> full = YeBargEstimateFromCounts(
      tally.counts_f, tally.n_f, reduced_ + 1, f_channel_.w(), eps_);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(full[i], 0.0);
  return p;
}

double SparseBernoulliPipeline::EstimatePs(const Tally& tally) const {
  if (tally.n_g <= 0.0) return cfg_.floor;
  const std::vector<double> full =
      YeBargEstimateFromCounts(tally.counts_g, tally.n_g, 2, 1, eps_);
  return std::max(full[0], cfg_.floor);
}

std::vector<double> SparseBernoulliPipeline::Estimate(
    const Tally& tally) const {
  return ThetaFromReduction(EstimateP(tally), EstimatePs(tally), cfg_.halving);
}

std::vector<double> SparseBernoulliPipeline::Run(const BinaryMatrix& samples,
                                                 CounterRng& rng) const {
  if (static_cast<int>(samples.cols) != d_) {
    throw DimensionMismatchError("sample matrix has wrong width");
  }
  Tally tally = NewTally();
  const std::size_t first = FirstPhaseCount(samples.rows);
  std::vector<int> subset;
  subset.reserve(static_cast<std::size_t>(f_channel_.w()));
  for (std::size_t k = 0; k < samples.rows; ++k) {
    if (k < first) {
      ReportF(samples.Row(k), rng, subset);
      AddF(tally, subset);
    } else {
      AddG(tally, ReportG(samples.Row(k), rng));
    }
  }
  return Estimate(tally);
}

std::vector<double> SparseBernoulliEstimate(const BinaryMatrix& samples,
                                            double eps,
                                            const SparsePipelineConfig& cfg,
                                            CounterRng& rng) {
  const SparseBernoulliPipeline pipeline(static_cast<int>(samples.cols), eps,
                                         cfg);
  return pipeline.Run(samples, rng);
}

std::vector<std::vector<int>> GroupParams(std::span<const double> theta_hat,
                                          double cap) {
  if (!(cap > 0.0)) throw ArgumentDomainError("group cap must be positive");
  for (double v : theta_hat) {
    if (v > cap) throw ArgumentDomainError("element exceeds the group cap");
  }
  std::vector<int> order(theta_hat.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return theta_hat[static_cast<std::size_t>(a)] > theta_hat[static_cast<std::size_t>(b)];
  });
  std::vector<std::vector<int>> groups;
  std::vector<double> sums;
  for (int i : order) {
    const double v = theta_hat[static_cast<std::size_t>(i)];
    if (groups.empty() || sums.back() + v > cap + 1e-12) {
      groups.emplace_back();
      sums.push_back(0.0);
    }
    groups.back().push_back(i);
    sums.back() += v;
  }
  for (auto& group : groups) std::sort(group.begin(), group.end());
  return groups;
}

void TwoPhaseConfig::Validate(int d) const {
  if (!(phase1_fraction > 0.0 && phase1_fraction < 1.0)) {
    throw ConfigError("phase1_fraction must lie in (0, 1)");
  }
  if (!(group_cap >= 1.0 + 1.0 / d)) {
    throw ConfigError("group_cap must be at least 1 + 1/d");
  }
  if (!(precision >= 0.0)) throw ConfigError("precision must be >= 0");
  sparse.Validate();
}

std::vector<double> BinaryRrMeanEstimate(std::span<const double> ones,
                                         std::span<const double> totals,
                                         double eps) {
  if (ones.size() != totals.size()) {
    throw DimensionMismatchError("ones and totals differ in length");
  }
  CheckPositiveEps(eps);
  const double e = std::exp(eps);
  std::vector<double> theta(ones.size(), 0.0);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (totals[j] <= 0.0) continue;
    theta[j] = (ones[j] / totals[j] - 1.0 / (e + 1.0)) * (e + 1.0) / (e - 1.0);
  }
  return theta;
}

std::vector<std::size_t> Apportion(std::size_t total,
                                   std::span<const double> weights) {
  std::vector<std::size_t> out(weights.size(), 0);
  if (weights.empty()) return out;
  double sum = 0.0;
  for (double w : weights) sum += std::max(w, 0.0);
  std::vector<double> remainder(weights.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double quota = sum > 0.0 ? total * std::max(weights[j], 0.0) / sum
                                   : static_cast<double>(total) / weights.size();
    out[j] = static_cast<std::size_t>(std::floor(quota));
    remainder[j] = quota - static_cast<double>(out[j]);
    assigned += out[j];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) {
    ++out[order[r % order.size()]];
  }
  return out;
}

TwoPhaseResult TwoPhaseEstimate(const BinaryMatrix& samples, double eps,
                                const TwoPhaseConfig& cfg, CounterRng& rng) {
  const int d = static_cast<int>(samples.cols);
  if (d < 1) throw ArgumentDomainError("two-phase estimator needs d >= 1");
  CheckPositiveEps(eps);
  cfg.Validate(d);
  const std::size_t n = samples.rows;
  if (n < 2) throw ArgumentDomainError("two-phase estimator needs n >= 2");
  const std::size_t n1 = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.phase1_fraction * n)), 1, n - 1);
  const double precision = cfg.precision > 0.0 ? cfg.precision : 1.0 / d;

  // Phase 1: node k reports coordinate k mod d through binary RR.
  const KrrChannel rr(2, eps);
  std::vector<double> ones(static_cast<std::size_t>(d), 0.0);
  std::vector<double> totals(static_cast<std::size_t>(d), 0.0);
  for (std::size_t k = 0; k < n1; ++k) {
    const std::size_t j = k % static_cast<std::size_t>(d);
    ones[j] += rr.Sample(samples.Row(k)[j], rng);
    totals[j] += 1.0;
  }
  TwoPhaseResult result;
  result.coarse = BinaryRrMeanEstimate(ones, totals, eps);

  std::vector<double> clipped(result.coarse.size());
  std::vector<int> rest;
  std::vector<double> rest_values;
  for (std::size_t j = 0; j < clipped.size(); ++j) {
    clipped[j] = std::max(result.coarse[j], 0.0);
    if (clipped[j] > cfg.group_cap) {
      result.groups.push_back({static_cast<int>(j)});
    } else {
      rest.push_back(static_cast<int>(j));
      rest_values.push_back(clipped[j]);
    }
  }
  for (const auto& group : GroupParams(rest_values, cfg.group_cap)) {
    std::vector<int> mapped;
    for (int i : group) mapped.push_back(rest[static_cast<std::size_t>(i)]);
    std::sort(mapped.begin(), mapped.end());
    result.groups.push_back(std::move(mapped));
  }

  // Phase 2: apportion the remaining nodes, then split every group into c
  // copies of mass <= 1 and run the sparse pipeline on each copy.
  std::vector<double> sizes;
  for (const auto& group : result.groups) sizes.push_back(static_cast<double>(group.size()));
  result.group_nodes = Apportion(n - n1, sizes);
  result.theta_hat.assign(static_cast<std::size_t>(d), 0.0);
  std::size_t next = n1;
  for (std::size_t g = 0; g < result.groups.size(); ++g) {
    const auto& group = result.groups[g];
    double mass = 0.0;
    for (int i : group) mass += clipped[static_cast<std::size_t>(i)] + precision;
    const int copies = std::max(1, static_cast<int>(std::ceil(mass - 1e-12)));
    result.repetitions.push_back(copies);
    const std::vector<std::size_t> per_copy =
        Apportion(result.group_nodes[g], std::vector<double>(static_cast<std::size_t>(copies), 1.0));
    const SparseBernoulliPipeline pipeline(static_cast<int>(group.size()), eps,
                                           cfg.sparse);
    const double keep = 1.0 / copies;
    for (int c = 0; c < copies; ++c) {
      BinaryMatrix sub(per_copy[static_cast<std::size_t>(c)], group.size());
      for (std::size_t r = 0; r < sub.rows; ++r, ++next) {
        const auto row = samples.Row(next);
        auto out = sub.Row(r);
        for (std::size_t t = 0; t < group.size(); ++t) {
          out[t] = row[static_cast<std::size_t>(group[t])] &&
                   (copies == 1 || rng.Uniform() < keep);
        }
      }
      const std::vector<double> part = pipeline.Run(sub, rng);
      for (std::size_t t = 0; t < group.size(); ++t) {
        result.theta_hat[static_cast<std::size_t>(group[t])] += part[t];
      }
    }
  }
  return result;
}

std::vector<double> NormPmfEstimate(std::span<const double> bucket_counts,
                                    double m, double eps) {
  if (bucket_counts.size() < 2) {
    throw DimensionMismatchError("norm buckets need d + 1 >= 2 entries");
  }
  return KrrFrequencyEstimate(bucket_counts, m,
                              static_cast<int>(bucket_counts.size()), eps);
}

double EstimateMeanRate(std::span<const double> bucket_counts, double m, int k,
                        double eps, bool clamp) {
  if (!(m > 0.0)) throw ArgumentDomainError("empty reports");
  if (k < 1) throw ArgumentDomainError("k must be >= 1");
  const std::vector<double> pmf = NormPmfEstimate(bucket_counts, m, eps);
  double rate = 0.0;
  for (std::size_t v = 0; v < pmf.size(); ++v) {
    rate += static_cast<double>(std::max<std::size_t>(v, static_cast<std::size_t>(k))) / k * pmf[v];
  }
  return clamp ? std::max(rate, 1.0) : rate;
}

double EstimateMeanRate(std::span<const int> bucket_reports, int d, int k,
                        double eps) {
  if (bucket_reports.empty()) throw ArgumentDomainError("empty reports");
  std::vector<double> counts(static_cast<std::size_t>(d) + 1, 0.0);
  for (int v : bucket_reports) {
    if (v < 0 || v > d) throw ArgumentDomainError("bucket report out of range");
    counts[static_cast<std::size_t>(v)] += 1.0;
  }
  return EstimateMeanRate(counts, static_cast<double>(bucket_reports.size()), k, eps);
}

double EstimateKeptRate(std::span<const double> bucket_counts, double m, int k,
                        double eps) {
  if (!(m > 0.0)) throw ArgumentDomainError("empty reports");
  if (k < 1) throw ArgumentDomainError("k must be >= 1");
  const std::vector<double> pmf = NormPmfEstimate(bucket_counts, m, eps);
  double total = 0.0;
  double kept = 0.0;
  for (std::size_t v = 0; v < pmf.size(); ++v) {
    total += static_cast<double>(v) * pmf[v];
    kept += static_cast<double>(std::min<std::size_t>(v, static_cast<std::size_t>(k))) * pmf[v];
  }
  if (!(kept > 0.0)) return 1.0;
  return std::max(total / kept, 1.0);
}

double ExactMeanRate(std::span<const double> theta, int k) {
  if (k < 1) throw ArgumentDomainError("k must be >= 1");
  const std::vector<double> law = OnesLaw(theta, -1);
  double rate = 0.0;
  for (std::size_t v = 0; v < law.size(); ++v) {
    rate += static_cast<double>(std::max<std::size_t>(v, static_cast<std::size_t>(k))) / k * law[v];
  }
  return rate;
}

std::vector<double> ExactCoordinateRates(std::span<const double> theta, int k) {
  if (k < 1) throw ArgumentDomainError("k must be >= 1");
  std::vector<double> mu(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const std::vector<double> law = OnesLaw(theta, static_cast<int>(i));
    double keep = 0.0;
    for (std::size_t v = 0; v < law.size(); ++v) {
      keep += law[v] * std::min(1.0, static_cast<double>(k) / (v + 1.0));
    }
    mu[i] = 1.0 / keep;
  }
  return mu;
}

std::vector<double> SubsampleKrrEstimate(std::span<const double> coord_counts,
                                         double n,
                                         const SubsampleAggregatorState& state) {
  if (!(n > 0.0)) throw ArgumentDomainError("empty reports");
  if (!(state.a > 0.0)) throw ArgumentDomainError("A must be positive");
  const std::size_t d = coord_counts.size();
  if (state.mu_r.size() != 1 && state.mu_r.size() != d) {
    throw DimensionMismatchError("mu_r must have 1 or d entries");
  }
  std::vector<double> theta(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double mu = state.mu_r.size() == 1 ? state.mu_r[0] : state.mu_r[i];
    theta[i] = mu * (coord_counts[i] / n - state.b) / state.a;
  }
  return theta;
}

std::vector<double> SubsampleKrrEstimate(
    std::span<const std::vector<int>> reports, int d,
    const SubsampleAggregatorState& state) {
  if (reports.empty()) throw ArgumentDomainError("empty reports");
  std::vector<double> counts(static_cast<std::size_t>(d), 0.0);
  for (const auto& report : reports) {
    for (int i : report) {
      if (i < 0 || i >= d) throw DimensionMismatchError("report index out of range");
      counts[static_cast<std::size_t>(i)] += 1.0;
    }
  }
  return SubsampleKrrEstimate(counts, static_cast<double>(reports.size()), state);
}

std::vector<double> GaussianMeanEstimate(std::span<const double> samples,
                                         int d, double eps, double clip,
                                         CounterRng& rng) {
  if (d < 1 || samples.size() % static_cast<std::size_t>(d) != 0) {
    throw DimensionMismatchError("samples must hold n * d values");
  }
  CheckPositiveEps(eps);
  if (!(clip > 0.0)) throw ArgumentDomainError("clip must be positive");
  const std::size_t n = samples.size() / static_cast<std::size_t>(d);
  if (n == 0) throw ArgumentDomainError("empty samples");
  const KrrChannel rr(2, eps);
  std::vector<double> ones(static_cast<std::size_t>(d), 0.0);
  std::vector<double> totals(static_cast<std::size_t>(d), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k % static_cast<std::size_t>(d);
    const double x = std::clamp(samples[k * static_cast<std::size_t>(d) + j], -clip, clip);
    const int bit = rng.Uniform() < 0.5 * (1.0 + x / clip) ? 1 : 0;
    ones[j] += rr.Sample(bit, rng);
    totals[j] += 1.0;
  }
  const double gap = rr.keep_probability() - rr.other_probability();
  std::vector<double> theta(static_cast<std::size_t>(d), 0.0);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (totals[j] <= 0.0) continue;
    const double q = (ones[j] / totals[j] - rr.other_probability()) / gap;
    theta[j] = clip * (2.0 * q - 1.0);
  }
  return theta;
}

}  // namespace ldpfisher
