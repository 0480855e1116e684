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

#ifndef LDPFISHER_FISHER_H_
#define LDPFISHER_FISHER_H_

#include <string>

#include "ldpfisher/channels.h"
#include "ldpfisher/models.h"

namespace ldpfisher {

// Tr I_Y(theta) = sum_y ||sum_x S(x) Q(y|x) f(x)||^2 / f(y). Outputs with
// f(y) < 1e-300 contribute nothing.
double TraceFisherExact(const StatModel& model, const FiniteChannel& channel,
                        const ParamPoint& theta);

enum class FisherBoundKind {
  kVarianceQuadratic,    // I0 (e^eps - 1)^2
  kVarianceExponential,  // I0 e^eps
  kSubgaussian,          // 2 sigma^2 eps, eps >= 1
  kSubexponential,       // 2 sigma^2 eps^2, eps >= 1
};

std::string FisherBoundName(FisherBoundKind kind);

// parameter is I0 for the variance kinds and sigma^2 for the tail kinds.
double FisherBound(FisherBoundKind kind, double parameter, double eps);

// min{I0 (e^eps - 1)^2, I0 e^eps}.
double VarianceFisherBound(double i0, double eps);

struct VanTreesResult {
  double value;
  bool first_term_dominates;  // n * sup_trace >= d pi^2 / B^2
};

// d^2 / (n sup_trace + d pi^2 / B^2).
VanTreesResult VanTreesBound(int d, double n, double sup_trace,
                             double half_width);

struct LowerBoundReport {
  std::string model;
  int d = 0;
  double n = 0.0;
  double eps = 0.0;
  double half_width = 0.0;
  double i0 = 0.0;
  double sigma2 = 0.0;           // 0 when no tail bound applies
  double classical_trace = 0.0;  // sup of Tr I_X over the domain grid
  double sup_trace = 0.0;
  std::string binding_bound;
  double van_trees_value = 0.0;
  std::string corollary;
  bool condition_ok = false;
};

// Picks the corollary setting from (model, domain), takes the tightest of
// the variance bounds, the sub-Gaussian bound (eps >= 1) and Tr I_X, and
// feeds the result to VanTreesBound. Bernoulli domains need a sum budget.
LowerBoundReport MinimaxLowerBound(const StatModel& model,
                                   const ParamDomain& domain, double n,
                                   double eps);

// max over domain.Grid(grid_resolution) of TraceFisherExact.
double SupTraceOverDomain(const StatModel& model, const FiniteChannel& channel,
                          const ParamDomain& domain, int grid_resolution = 0);

}  // namespace ldpfisher

#endif  // LDPFISHER_FISHER_H_
