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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ldpfisher/combinatorics.h"
#include "ldpfisher/errors.h"

namespace ldpfisher {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double CompensatedSum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

void CheckStochastic(std::size_t nx, std::size_t ny,
                     std::span<const double> kernel) {
  if (nx == 0 || ny == 0) {
    throw NonStochasticKernelError("kernel alphabets must be non-empty");
  }
  if (kernel.size() != nx * ny) {
    throw DimensionMismatchError("kernel size does not match alphabets");
  }
  for (double v : kernel) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw NonStochasticKernelError("kernel entries must be finite and >= 0");
    }
  }
  for (std::size_t x = 0; x < nx; ++x) {
    const double s = CompensatedSum(kernel.subspan(x * ny, ny));
    if (std::abs(s - 1.0) > 1e-12) {
      throw NonStochasticKernelError("kernel row " + std::to_string(x) +
                                     " sums to " + std::to_string(s));
    }
  }
}

void CheckEps(double eps) {
  if (std::isnan(eps) || eps < 0.0) {
    throw ArgumentDomainError("epsilon must be >= 0");
  }
}

}  // namespace

FiniteChannel::FiniteChannel(std::size_t nx, std::size_t ny,
                             std::vector<double> kernel, double eps_nominal,
                             std::string label)
    : nx_(nx),
      ny_(ny),
      kernel_(std::move(kernel)),
      eps_(eps_nominal),
      label_(std::move(label)) {
  CheckEps(eps_);
  CheckStochastic(nx_, ny_, kernel_);
  for (std::size_t y = 0; y < ny_; ++y) {
    bool any = false;
    for (std::size_t x = 0; x < nx_ && !any; ++x) any = kernel_[x * ny_ + y] > 0.0;
    if (!any) {
      throw NonStochasticKernelError("output column " + std::to_string(y) +
                                     " has probability zero for every input");
    }
  }
  const double certified = ValidateEpsKernel(nx_, ny_, kernel_);
  if (certified > eps_ + 1e-12) {
    throw PrivacyViolationError("kernel needs epsilon " +
                                std::to_string(certified) + " > nominal " +
                                std::to_string(eps_));
  }
}

FiniteChannel FiniteChannel::Certified(std::size_t nx, std::size_t ny,
                                       std::vector<double> kernel,
                                       std::string label) {
  CheckStochastic(nx, ny, kernel);
  const double eps = ValidateEpsKernel(nx, ny, kernel);
  return FiniteChannel(nx, ny, std::move(kernel), eps, std::move(label));
}

std::size_t FiniteChannel::Sample(std::size_t x, CounterRng& rng) const {
  if (x >= nx_) throw ArgumentDomainError("channel input out of range");
  const double u = rng.Uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t y = 0; y < ny_; ++y) {
    const double q = kernel_[x * ny_ + y];
    if (q > 0.0) last_positive = y;
    cumulative += q;
    if (u < cumulative) return y;
  }
  return last_positive;
}

double ValidateEpsKernel(std::size_t nx, std::size_t ny,
                         std::span<const double> kernel) {
  CheckStochastic(nx, ny, kernel);
  double eps = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double lo = kInf;
    double hi = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      const double q = kernel[x * ny + y];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    if (hi == 0.0) continue;
    if (lo == 0.0) return kInf;
    eps = std::max(eps, std::log(hi / lo));
  }
  return eps;
}

double ValidateEps(const FiniteChannel& channel) {
  return ValidateEpsKernel(channel.input_size(), channel.output_size(),
                           channel.kernel());
}

std::vector<double> PushForward(const FiniteChannel& channel,
                                std::span<const double> input_dist) {
  if (input_dist.size() != channel.input_size()) {
    throw DimensionMismatchError("input distribution has " +
                                 std::to_string(input_dist.size()) +
                                 " entries, channel expects " +
                                 std::to_string(channel.input_size()));
  }
  double total = 0.0;
  for (double p : input_dist) {
    if (!(p >= 0.0)) throw ArgumentDomainError("negative input probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ArgumentDomainError("input distribution does not sum to 1");
  }
  std::vector<double> out(channel.output_size(), 0.0);
  for (std::size_t x = 0; x < channel.input_size(); ++x) {
    if (input_dist[x] == 0.0) continue;
    const auto row = channel.Row(x);
    for (std::size_t y = 0; y < out.size(); ++y) out[y] += input_dist[x] * row[y];
  }
  return out;
}

FiniteChannel IdentityChannel(std::size_t n) {
  std::vector<double> kernel(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) kernel[i * n + i] = 1.0;
  return FiniteChannel(n, n, std::move(kernel), kInf, "identity");
}

FiniteChannel UniformChannel(std::size_t nx, std::size_t ny) {
  return FiniteChannel(nx, ny,
                       std::vector<double>(nx * ny, 1.0 / static_cast<double>(ny)),
                       0.0, "uniform");
}

FiniteChannel RandomLdpChannel(std::size_t nx, std::size_t ny, double eps,
                               CounterRng& rng) {
  if (nx < 2 || ny < 2) throw ArgumentDomainError("random channel needs nx, ny >= 2");
  CheckEps(eps);
  if (!std::isfinite(eps)) throw ArgumentDomainError("random channel needs finite eps");
  std::vector<double> base(ny);
  for (double& b : base) b = 0.1 + rng.Uniform();
  // Exponents in [0, 1]; half of the channels use extreme {0, 1} exponents.
  const bool extreme = rng.Bernoulli(0.5);
  std::vector<double> expo(nx * ny);
  for (double& e : expo) e = extreme ? (rng.Bernoulli(0.5) ? 1.0 : 0.0) : rng.Uniform();

  std::vector<double> kernel(nx * ny);
  double scale = 1.0;
  for (int attempt = 0; attempt < 200; ++attempt) {
    for (std::size_t x = 0; x < nx; ++x) {
      double row_sum = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        const double v = base[y] * std::exp(scale * eps * expo[x * ny + y]);
        kernel[x * ny + y] = v;
        row_sum += v;
      }
      for (std::size_t y = 0; y < ny; ++y) kernel[x * ny + y] /= row_sum;
    }
    // Renormalize the last entry so rows sum to 1 to rounding.
    for (std::size_t x = 0; x < nx; ++x) {
      double partial = 0.0;
      for (std::size_t y = 0; y + 1 < ny; ++y) partial += kernel[x * ny + y];
      kernel[x * ny + ny - 1] = 1.0 - partial;
    }
    const double certified = ValidateEpsKernel(nx, ny, kernel);
    if (certified <= eps) {
      return FiniteChannel(nx, ny, kernel, eps, "random");
    }
    scale *= std::min(0.999, eps / certified);
  }
  return UniformChannel(nx, ny);
}

bool StructuredChannel::Materializable() const {
  return output_size() <= kMaterializationCap &&
         static_cast<double>(input_size()) * static_cast<double>(output_size()) <= 5e7;
}

KrrChannel::KrrChannel(int k, double eps) : k_(k), eps_(eps) {
  if (k < 2) throw ArgumentDomainError("k-RR needs k >= 2");
  CheckEps(eps);
  const double t = std::exp(-eps);
  keep_ = 1.0 / (1.0 + (k - 1) * t);
  other_ = t / (1.0 + (k - 1) * t);
}

std::uint64_t KrrChannel::SampleSymbol(std::uint64_t x, CounterRng& rng) const {
  if (x >= static_cast<std::uint64_t>(k_)) throw ArgumentDomainError("k-RR input out of range");
  if (rng.Uniform() < keep_) return x;
  std::uint64_t u = rng.UniformInt(static_cast<std::uint64_t>(k_ - 1));
  return u >= x ? u + 1 : u;
}

FiniteChannel KrrChannel::Materialize() const {
  const auto k = static_cast<std::size_t>(k_);
  if (k > kMaterializationCap) throw CapExceededError("k-RR alphabet over cap");
  std::vector<double> kernel(k * k, other_);
  for (std::size_t i = 0; i < k; ++i) kernel[i * k + i] = keep_;
  // Put rounding residue on the diagonal so rows sum to 1.
  for (std::size_t i = 0; i < k; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) off += kernel[i * k + j];
    }
    if (other_ > 0.0) kernel[i * k + i] = std::max(keep_, 1.0 - off);
  }
  return FiniteChannel(k, k, std::move(kernel), eps_,
                       "krr(k=" + std::to_string(k_) + ")");
}

KrrChannel MakeKrr(int k, double eps) { return KrrChannel(k, eps); }

KrrChannel MakeBinaryRr(double eps) { return KrrChannel(2, eps); }

YeBargChannel::YeBargChannel(int d, int w, double eps) : d_(d), w_(w), eps_(eps) {
  if (d < 2 || w < 1 || w > d - 1) {
    throw ArgumentDomainError("subset mechanism needs 1 <= w <= d-1");
  }
  CheckEps(eps);
  const double t = std::exp(-eps);
  const double with_i = Binomial(d - 1, w - 1);
  const double without_i = Binomial(d - 1, w);
  include_ = 1.0 / (1.0 + t * without_i / with_i);
  high_ = 1.0 / (with_i + t * without_i);
  low_ = t * high_;
}

std::uint64_t YeBargChannel::output_size() const {
  return BinomialU64(d_, w_);
}

void YeBargChannel::SampleInto(int x, CounterRng& rng,
                               std::vector<int>& out) const {
  out.clear();
  if (rng.Uniform() < include_) {
    out.push_back(x);
    SampleDistinct(d_, w_ - 1, x, rng, out);
  } else {
    SampleDistinct(d_, w_, x, rng, out);
  }
}

std::vector<int> YeBargChannel::Sample(int x, CounterRng& rng) const {
  if (x < 0 || x >= d_) throw ArgumentDomainError("subset mechanism input out of range");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(w_));
  SampleInto(x, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t YeBargChannel::SampleSymbol(std::uint64_t x,
                                          CounterRng& rng) const {
  return RankSubset(Sample(static_cast<int>(x), rng));
}

FiniteChannel YeBargChannel::Materialize() const {
  const std::uint64_t ny = output_size();
  if (ny > kMaterializationCap) {
    throw CapExceededError("C(" + std::to_string(d_) + "," + std::to_string(w_) +
                           ") outputs exceed the materialization cap");
  }
  const auto nx = static_cast<std::size_t>(d_);
  std::vector<double> kernel(nx * ny, low_);
  for (std::uint64_t r = 0; r < ny; ++r) {
    for (int i : UnrankSubset(r, d_, w_)) {
      kernel[static_cast<std::size_t>(i) * ny + r] = high_;
    }
  }
  return FiniteChannel(nx, ny, std::move(kernel), eps_,
                       "yebarg(d=" + std::to_string(d_) +
                           ",w=" + std::to_string(w_) + ")");
}

YeBargChannel MakeYeBarg(int d, int w, double eps) {
  return YeBargChannel(d, w, eps);
}

int SubsampleSupport(std::vector<int>& support, int k, CounterRng& rng) {
  if (k < 1) throw ArgumentDomainError("subsample needs k >= 1");
  const int m = static_cast<int>(support.size());
  if (m <= k) return m;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(m - i)));
    std::swap(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
  }
  return k;
}

SubsampleResult Subsample(std::span<const std::uint8_t> x, int k,
                          CounterRng& rng) {
  std::vector<int> support;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) support.push_back(static_cast<int>(i));
  }
  const int m = static_cast<int>(support.size());
  const int kept = SubsampleSupport(support, k, rng);
  SubsampleResult result{std::vector<std::uint8_t>(x.size(), 0),
                         static_cast<double>(std::max(m, k)) / k};
  for (int i = 0; i < kept; ++i) result.kept[static_cast<std::size_t>(support[static_cast<std::size_t>(i)])] = 1;
  return result;
}

KSelection SelectK(int d, double eps, double slack) {
  if (d < 1) throw ArgumentDomainError("select_k needs d >= 1");
  if (!(eps > 0.0) || !(slack >= 0.0)) {
    throw ArgumentDomainError("select_k needs eps > 0 and slack >= 0");
  }
  const double log_limit = eps - slack * std::log(static_cast<double>(d));
  int k = 0;
  while (k < d &&
         std::log(static_cast<double>(SparseSupportCount(d, k + 1))) <= log_limit) {
    ++k;
  }
  if (k == 0) {
    throw InfeasiblePrivacyError("no k >= 1 fits exp(eps - slack log d) for d=" +
                                 std::to_string(d));
  }
  const std::uint64_t n = SparseSupportCount(d, k);
  const double p_e = 1.0 / (1.0 + std::exp(eps) / static_cast<double>(n - 1));
  return {k, n, p_e, log_limit};
}

AffineMarginal ComputeAb(int d, int k, double eps) {
  if (d < 1 || k < 1 || k > d) throw ArgumentDomainError("compute_ab needs 1 <= k <= d");
  CheckEps(eps);
  const auto n = static_cast<double>(SparseSupportCount(d, k));
  const double p_e = 1.0 / (1.0 + std::exp(eps) / (n - 1.0));
  // S1: supports of size 2..k containing a fixed index; S2: sizes 1..k.
  double s1 = 0.0;
  double s2 = 0.0;
  for (int i = 1; i <= k; ++i) {
    if (i > 1) s1 += Binomial(d - 1, i - 1);
    s2 += Binomial(d - 1, i - 1);
  }
  return {(1.0 - p_e) + p_e * (s1 - s2) / (n - 1.0), p_e * s2 / (n - 1.0)};
}

SubsampleKrrChannel::SubsampleKrrChannel(int d, int k, double eps, int)
    : d_(d), k_(k), eps_(eps) {
  if (d < 1 || d > 63 || k < 1 || k > d) {
    throw ArgumentDomainError("subsample k-RR needs 1 <= k <= d <= 63");
  }
  CheckEps(eps);
  support_size_ = SparseSupportCount(d, k);
  p_e_ = 1.0 / (1.0 + std::exp(eps) / static_cast<double>(support_size_ - 1));
  ab_ = ComputeAb(d, k, eps);
}

SubsampleKrrChannel::SubsampleKrrChannel(int d, double eps, double slack)
    : SubsampleKrrChannel(d, SelectK(d, eps, slack).k, eps, 0) {}

SubsampleKrrChannel SubsampleKrrChannel::WithK(int d, int k, double eps) {
  return SubsampleKrrChannel(d, k, eps, 0);
}

std::uint64_t SubsampleKrrChannel::input_size() const {
  return std::uint64_t{1} << d_;
}

void SubsampleKrrChannel::PrivatizeSupport(std::span<const int> kept,
                                           CounterRng& rng,
                                           std::vector<int>& out) const {
  if (static_cast<int>(kept.size()) > k_) {
    throw ArgumentDomainError("support larger than k");
  }
  if (rng.Uniform() >= p_e_) {
    out.assign(kept.begin(), kept.end());
    return;
  }
  const std::uint64_t r = RankSparseSupport(kept, d_);
  std::uint64_t u = rng.UniformInt(support_size_ - 1);
  if (u >= r) ++u;
  out = UnrankSparseSupport(u, d_);
}

std::vector<int> SubsampleKrrChannel::Sample(std::span<const std::uint8_t> x,
                                             CounterRng& rng,
                                             double* rate) const {
  if (static_cast<int>(x.size()) != d_) {
    throw DimensionMismatchError("subsample k-RR input has wrong length");
  }
  std::vector<int> support;
  for (int i = 0; i < d_; ++i) {
    if (x[static_cast<std::size_t>(i)]) support.push_back(i);
  }
  const int m = static_cast<int>(support.size());
  const int kept = SubsampleSupport(support, k_, rng);
  support.resize(static_cast<std::size_t>(kept));
  std::sort(support.begin(), support.end());
  if (rate != nullptr) *rate = static_cast<double>(std::max(m, k_)) / k_;
  std::vector<int> out;
  PrivatizeSupport(support, rng, out);
  return out;
}

std::uint64_t SubsampleKrrChannel::SampleSymbol(std::uint64_t x,
                                                CounterRng& rng) const {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(d_));
  for (int i = 0; i < d_; ++i) bits[static_cast<std::size_t>(i)] = (x >> i) & 1U;
  return RankSparseSupport(Sample(bits, rng), d_);
}

FiniteChannel SubsampleKrrChannel::Materialize() const {
  if (!Materializable() || d_ > 20) {
    throw CapExceededError("subsample k-RR kernel too large to materialize");
  }
  const std::size_t nx = std::size_t{1} << d_;
  const std::size_t ny = support_size_;
  const double other = p_e_ / static_cast<double>(support_size_ - 1);
  const double keep = 1.0 - p_e_;
  std::vector<double> kernel(nx * ny, other);
  std::vector<int> support;
  std::vector<int> chosen;
  for (std::size_t x = 0; x < nx; ++x) {
    support.clear();
    for (int i = 0; i < d_; ++i) {
      if ((x >> i) & 1U) support.push_back(i);
    }
    const int m = static_cast<int>(support.size());
    const int size = std::min(m, k_);
    const std::uint64_t count = BinomialU64(m, size);
    const double mass = (keep - other) / static_cast<double>(count);
    for (std::uint64_t r = 0; r < count; ++r) {
      chosen.clear();
      for (int pos : UnrankSubset(r, m, size)) {
        chosen.push_back(support[static_cast<std::size_t>(pos)]);
      }
      kernel[x * ny + RankSparseSupport(chosen, d_)] += mass;
    }
  }
  return FiniteChannel(nx, ny, std::move(kernel), eps_,
                       "subsample_krr(d=" + std::to_string(d_) +
                           ",k=" + std::to_string(k_) + ")");
}

SubsampleKrrChannel MakeSubsampleKrr(int d, double eps, double slack) {
  return SubsampleKrrChannel(d, eps, slack);
}

}  // namespace ldpfisher
