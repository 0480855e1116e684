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

#ifndef LDPFISHER_ORACLE_H_
#define LDPFISHER_ORACLE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ldpfisher/channels.h"
#include "ldpfisher/estimator_spec.h"
#include "ldpfisher/models.h"

// Brute-force references. Nothing here calls the Fisher or estimator
// engines; densities and marginals are recomputed from first principles.
namespace ldpfisher::oracle {

struct EnumeratedLaw {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> joint;  // row-major nx * ny
  std::vector<double> input_marginal;
  std::vector<double> output_marginal;
};

EnumeratedLaw Enumerate(const FiniteChannel& channel,
                        std::span<const double> input_dist);

struct AffineMoments {
  std::vector<double> bias;
  double mse = 0.0;
};

// Exact bias and E||p_hat - target||^2 of an affine estimator over n i.i.d.
// reports. indicators is ny x dim (row-major): the statistic contributed by
// output symbol y to coordinate i.
AffineMoments ExactAffineEstimatorMoments(const FiniteChannel& channel,
                                          std::span<const double> input_dist,
                                          std::span<const double> indicators,
                                          std::span<const double> targets,
                                          const AffineEstimatorSpec& spec,
                                          double n);

// Probability mass of a finite model, computed independently of StatModel.
double ModelMass(const StatModel& model, const ParamPoint& theta,
                 std::size_t index);

// Sum_y f(y) sum_j (d/d theta_j log f(y|theta))^2 with Richardson-extrapolated
// central differences. Throws ArgumentDomainError when theta +- 2 step leaves
// the interior.
double FiniteDiffTrace(const StatModel& model, const FiniteChannel& channel,
                       const ParamPoint& theta, double step = 1e-5);

// E (g(T) - target)^2 for T ~ Binomial(n, q), by summing the pmf.
double ExactBinomialTransformMse(int n, double q,
                                 const std::function<double(int)>& g,
                                 double target);

// Same for E g(T).
double ExactBinomialTransformMean(int n, double q,
                                  const std::function<double(int)>& g);

}  // namespace ldpfisher::oracle

#endif  // LDPFISHER_ORACLE_H_
