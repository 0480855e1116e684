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

#include "ldpfisher/oracle.h"

#include <cmath>
#include <string>

#include "ldpfisher/errors.h"

namespace ldpfisher::oracle {
namespace {

std::size_t SpaceSize(const StatModel& model) {
  if (model.kind() == ModelKind::kBernoulliProduct) {
    return std::size_t{1} << model.dim();
  }
  if (model.kind() == ModelKind::kMultinomial) {
    return static_cast<std::size_t>(model.dim()) + 1;
  }
  throw UnsupportedError("oracle needs a finite model");
}

std::vector<double> OutputLaw(const StatModel& model,
                              const FiniteChannel& channel,
                              const ParamPoint& theta) {
  const std::size_t nx = SpaceSize(model);
  std::vector<double> f(channel.output_size(), 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    const double px = ModelMass(model, theta, x);
    for (std::size_t y = 0; y < f.size(); ++y) f[y] += px * channel(x, y);
  }
  return f;
}

}  // namespace

EnumeratedLaw Enumerate(const FiniteChannel& channel,
                        std::span<const double> input_dist) {
  if (input_dist.size() != channel.input_size()) {
    throw DimensionMismatchError("oracle: input distribution size mismatch");
  }
  EnumeratedLaw law;
  law.nx = channel.input_size();
  law.ny = channel.output_size();
  law.joint.assign(law.nx * law.ny, 0.0);
  law.input_marginal.assign(law.nx, 0.0);
  law.output_marginal.assign(law.ny, 0.0);
  double total = 0.0;
  for (std::size_t x = 0; x < law.nx; ++x) {
    for (std::size_t y = 0; y < law.ny; ++y) {
      const double p = input_dist[x] * channel(x, y);
      law.joint[x * law.ny + y] = p;
      law.input_marginal[x] += p;
      law.output_marginal[y] += p;
      total += p;
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ArgumentDomainError("oracle: joint law does not sum to 1");
  }
  return law;
}

AffineMoments ExactAffineEstimatorMoments(const FiniteChannel& channel,
                                          std::span<const double> input_dist,
                                          std::span<const double> indicators,
                                          std::span<const double> targets,
                                          const AffineEstimatorSpec& spec,
                                          double n) {
  if (!(n >= 1.0)) throw ArgumentDomainError("oracle: n must be >= 1");
  if (channel.output_size() > kMaterializationCap) {
    throw CapExceededError("oracle: output alphabet over cap");
  }
  const std::size_t dim = targets.size();
  if (indicators.size() != channel.output_size() * dim) {
    throw DimensionMismatchError("oracle: indicator table size mismatch");
  }
  const EnumeratedLaw law = Enumerate(channel, input_dist);
  AffineMoments moments;
  moments.bias.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    // First and second moments of the per-report statistic.
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t y = 0; y < law.ny; ++y) {
      const double v = indicators[y * dim + i];
      m1 += law.output_marginal[y] * v;
      m2 += law.output_marginal[y] * v * v;
    }
    const double mean = spec.slope * m1 - spec.intercept;
    const double var = spec.slope * spec.slope * (m2 - m1 * m1) / n;
    moments.bias[i] = mean - targets[i];
    moments.mse += moments.bias[i] * moments.bias[i] + var;
  }
  return moments;
}

double ModelMass(const StatModel& model, const ParamPoint& theta,
                 std::size_t index) {
  const int d = model.dim();
  if (model.kind() == ModelKind::kBernoulliProduct) {
    double p = 1.0;
    for (int j = 0; j < d; ++j) {
      const double t = theta[static_cast<std::size_t>(j)];
      p *= (index >> j) & 1U ? t : 1.0 - t;
    }
    return p;
  }
  if (model.kind() == ModelKind::kMultinomial) {
    if (index < static_cast<std::size_t>(d)) return theta[index];
    double rest = 1.0;
    for (double t : theta) rest -= t;
    return rest;
  }
  throw UnsupportedError("oracle needs a finite model");
}

double FiniteDiffTrace(const StatModel& model, const FiniteChannel& channel,
                       const ParamPoint& theta, double step) {
  const std::size_t nx = SpaceSize(model);
  if (channel.input_size() != nx) {
    throw DimensionMismatchError("oracle: channel input alphabet mismatch");
  }
  if (static_cast<int>(theta.size()) != model.dim()) {
    throw DimensionMismatchError("oracle: parameter size mismatch");
  }
  if (!(step > 0.0)) throw ArgumentDomainError("oracle: step must be positive");
  const double margin = 2.0 * step;
  double rest = 1.0;
  for (double t : theta) {
    if (t - margin <= 0.0 || t + margin >= 1.0) {
      throw ArgumentDomainError("oracle: parameter within step of the boundary");
    }
    rest -= t;
  }
  if (model.kind() == ModelKind::kMultinomial && rest - margin <= 0.0) {
    throw ArgumentDomainError("oracle: derived coordinate within step of 0");
  }

  const std::vector<double> f0 = OutputLaw(model, channel, theta);
  const std::size_t ny = f0.size();
  std::vector<double> total(ny, 0.0);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    auto diff = [&](double h) {
      ParamPoint plus = theta;
      ParamPoint minus = theta;
      plus[j] += h;
      minus[j] -= h;
      const std::vector<double> fp = OutputLaw(model, channel, plus);
      const std::vector<double> fm = OutputLaw(model, channel, minus);
      std::vector<double> g(ny, 0.0);
      for (std::size_t y = 0; y < ny; ++y) {
        if (fp[y] > 0.0 && fm[y] > 0.0) {
          g[y] = (std::log(fp[y]) - std::log(fm[y])) / (2.0 * h);
        }
      }
      return g;
    };
    const std::vector<double> coarse = diff(2.0 * step);
    const std::vector<double> fine = diff(step);
    for (std::size_t y = 0; y < ny; ++y) {
      const double g = (4.0 * fine[y] - coarse[y]) / 3.0;
      total[y] += g * g;
    }
  }
  double trace = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    if (f0[y] < 1e-300) continue;
    trace += f0[y] * total[y];
  }
  return trace;
}

double ExactBinomialTransformMse(int n, double q,
                                 const std::function<double(int)>& g,
                                 double target) {
  if (n < 1 || !(q >= 0.0 && q <= 1.0)) {
    throw ArgumentDomainError("oracle: bad binomial parameters");
  }
  double total = 0.0;
  for (int t = 0; t <= n; ++t) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(t + 1.0) -
                           std::lgamma(n - t + 1.0) +
                           (t > 0 ? t * std::log(q) : 0.0) +
                           (n - t > 0 ? (n - t) * std::log1p(-q) : 0.0);
    const double e = g(t) - target;
    total += std::exp(log_pmf) * e * e;
  }
  return total;
}

double ExactBinomialTransformMean(int n, double q,
                                  const std::function<double(int)>& g) {
  if (n < 1 || !(q >= 0.0 && q <= 1.0)) {
    throw ArgumentDomainError("oracle: bad binomial parameters");
  }
  double total = 0.0;
  for (int t = 0; t <= n; ++t) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(t + 1.0) -
                           std::lgamma(n - t + 1.0) +
                           (t > 0 ? t * std::log(q) : 0.0) +
                           (n - t > 0 ? (n - t) * std::log1p(-q) : 0.0);
    total += std::exp(log_pmf) * g(t);
  }
  return total;
}

}  // namespace ldpfisher::oracle
