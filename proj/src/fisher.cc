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

#include "ldpfisher/fisher.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ldpfisher/errors.h"

namespace ldpfisher {

double TraceFisherExact(const StatModel& model, const FiniteChannel& channel,
                        const ParamPoint& theta) {
  if (!model.is_finite()) {
    throw UnsupportedError("exact Fisher trace needs a finite model");
  }
  model.CheckInterior(theta);
  const std::size_t nx = model.SampleSpaceSize();
  if (channel.input_size() != nx) {
    throw DimensionMismatchError("channel input alphabet does not match model");
  }
  const std::size_t d = theta.size();
  std::vector<double> mass(nx);
  std::vector<double> scores(nx * d);
  for (std::size_t x = 0; x < nx; ++x) {
    mass[x] = model.MassAt(theta, x);
    const ScoreVector s = model.ScoreAt(theta, x);
    std::copy(s.begin(), s.end(), scores.begin() + static_cast<std::ptrdiff_t>(x * d));
  }
  std::vector<double> g(d);
  double trace = 0.0;
  for (std::size_t y = 0; y < channel.output_size(); ++y) {
    double f = 0.0;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      const double w = mass[x] * channel(x, y);
      if (w == 0.0) continue;
      f += w;
      for (std::size_t j = 0; j < d; ++j) g[j] += w * scores[x * d + j];
    }
    if (f < 1e-300) continue;
    double norm2 = 0.0;
    for (double v : g) norm2 += v * v;
    trace += norm2 / f;
  }
  return trace;
}

std::string FisherBoundName(FisherBoundKind kind) {
  switch (kind) {
    case FisherBoundKind::kVarianceQuadratic:
      return "variance_quadratic";
    case FisherBoundKind::kVarianceExponential:
      return "variance_exponential";
    case FisherBoundKind::kSubgaussian:
      return "subgaussian";
    case FisherBoundKind::kSubexponential:
      return "subexponential";
  }
  return "unknown";
}

double FisherBound(FisherBoundKind kind, double parameter, double eps) {
  if (!(parameter > 0.0)) throw ArgumentDomainError("bound parameter must be > 0");
  if (!(eps >= 0.0)) throw ArgumentDomainError("epsilon must be >= 0");
  switch (kind) {
    case FisherBoundKind::kVarianceQuadratic: {
      const double e = std::expm1(eps);
      return parameter * e * e;
    }
    case FisherBoundKind::kVarianceExponential:
      return parameter * std::exp(eps);
    case FisherBoundKind::kSubgaussian:
    case FisherBoundKind::kSubexponential:
      if (eps < 1.0) {
        throw HypothesisError(FisherBoundName(kind) + " bound needs eps >= 1");
      }
      return kind == FisherBoundKind::kSubgaussian ? 2.0 * parameter * eps
                                                   : 2.0 * parameter * eps * eps;
  }
  return 0.0;
}

double VarianceFisherBound(double i0, double eps) {
  return std::min(FisherBound(FisherBoundKind::kVarianceQuadratic, i0, eps),
                  FisherBound(FisherBoundKind::kVarianceExponential, i0, eps));
}

VanTreesResult VanTreesBound(int d, double n, double sup_trace,
                             double half_width) {
  if (d < 1 || !(n > 0.0) || !(sup_trace >= 0.0) || !(half_width > 0.0) ||
      !std::isfinite(sup_trace)) {
    throw ArgumentDomainError("van Trees bound needs d, n, B > 0 and finite trace >= 0");
  }
  const double prior = d * std::numbers::pi * std::numbers::pi /
                       (half_width * half_width);
  const double info = n * sup_trace;
  return {static_cast<double>(d) * d / (info + prior), info >= prior};
}

LowerBoundReport MinimaxLowerBound(const StatModel& model,
                                   const ParamDomain& domain, double n,
                                   double eps) {
  if (!(eps > 0.0)) throw ArgumentDomainError("epsilon must be > 0");
  if (!(n > 0.0)) throw ArgumentDomainError("n must be > 0");
  domain.Validate();
  if (domain.dim() != model.dim()) {
    throw DimensionMismatchError("domain and model dimensions differ");
  }
  LowerBoundReport report;
  report.model = model.name();
  report.d = model.dim();
  report.n = n;
  report.eps = eps;
  report.half_width = domain.HalfWidth();
  report.i0 = ScoreVarianceSup(model, domain);

  bool tail_allowed = false;
  switch (model.kind()) {
    case ModelKind::kGaussianLocation:
      report.corollary = "cor1";
      report.classical_trace = model.dim() / (model.sigma0() * model.sigma0());
      tail_allowed = true;
      break;
    case ModelKind::kMultinomial:
      report.corollary = "cor2";
      break;
    case ModelKind::kBernoulliProduct:
      if (!domain.sum_budget) {
        throw UnsupportedError("bernoulli lower bound needs a sparsity budget");
      }
      report.corollary = *domain.sum_budget <= 1.0 ? "cor3i" : "cor3ii_high";
      tail_allowed = *domain.sum_budget > 1.0;
      break;
  }
  if (model.is_finite()) {
    for (const ParamPoint& theta : domain.Grid()) {
      report.classical_trace =
          std::max(report.classical_trace, model.SourceFisherTrace(theta));
    }
  }

  report.sup_trace = FisherBound(FisherBoundKind::kVarianceQuadratic, report.i0, eps);
  report.binding_bound = "variance_quadratic";
  const double exponential = FisherBound(FisherBoundKind::kVarianceExponential, report.i0, eps);
  if (exponential < report.sup_trace) {
    report.sup_trace = exponential;
    report.binding_bound = "variance_exponential";
  }
  if (tail_allowed && eps >= 1.0) {
    report.sigma2 = SubgaussianParam(model, domain);
    const double tail = FisherBound(FisherBoundKind::kSubgaussian, report.sigma2, eps);
    if (tail < report.sup_trace) {
      report.sup_trace = tail;
      report.binding_bound = "subgaussian";
      if (report.corollary == "cor3ii_high") report.corollary = "cor3ii_low";
    }
  }
  if (report.classical_trace > 0.0 && report.classical_trace < report.sup_trace) {
    report.sup_trace = report.classical_trace;
    report.binding_bound = "classical";
  }
  const VanTreesResult vt = VanTreesBound(report.d, n, report.sup_trace,
                                          report.half_width);
  report.van_trees_value = vt.value;
  report.condition_ok = vt.first_term_dominates;
  return report;
}

double SupTraceOverDomain(const StatModel& model, const FiniteChannel& channel,
                          const ParamDomain& domain, int grid_resolution) {
  double best = 0.0;
  for (const ParamPoint& theta : domain.Grid(grid_resolution)) {
    best = std::max(best, TraceFisherExact(model, channel, theta));
  }
  return best;
}

}  // namespace ldpfisher
