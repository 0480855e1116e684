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

#ifndef LDPFISHER_MODELS_H_
#define LDPFISHER_MODELS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldpfisher/random.h"

namespace ldpfisher {

using ParamPoint = std::vector<double>;
using Sample = std::vector<double>;
using ScoreVector = std::vector<double>;

// Distance from {0, 1} below which finite-model parameters are rejected.
inline constexpr double kSingularityGuard = 1e-9;

enum class ModelKind { kBernoulliProduct, kMultinomial, kGaussianLocation };

// Product Bernoulli on {0,1}^d, multinomial on {1..d+1} with d free
// coordinates, or N(theta, sigma0^2 I_d).
class StatModel {
 public:
  static StatModel BernoulliProduct(int d);
  static StatModel Multinomial(int d);
  static StatModel GaussianLocation(int d, double sigma0);

  ModelKind kind() const { return kind_; }
  int dim() const { return d_; }
  double sigma0() const { return sigma0_; }
  bool is_finite() const { return kind_ != ModelKind::kGaussianLocation; }
  std::string name() const;

  // Finite models only. Bernoulli points are indexed by their bit pattern
  // (bit j = coordinate j); multinomial category c (1-based) has index c-1.
  std::size_t SampleSpaceSize() const;
  Sample PointAt(std::size_t index) const;
  std::size_t IndexOf(const Sample& x) const;

  // Throws SingularParameterError for finite models when theta is within
  // kSingularityGuard of a boundary, DimensionMismatchError on size.
  void CheckInterior(const ParamPoint& theta) const;
  // Weaker check for sampling and densities: theta in the closed domain.
  void CheckClosed(const ParamPoint& theta) const;

  // Probability mass (finite) or density (Gaussian).
  double Density(const ParamPoint& theta, const Sample& x) const;
  double MassAt(const ParamPoint& theta, std::size_t index) const;
  std::vector<double> Pmf(const ParamPoint& theta) const;

  ScoreVector Score(const ParamPoint& theta, const Sample& x) const;
  ScoreVector ScoreAt(const ParamPoint& theta, std::size_t index) const;

  Sample Draw(const ParamPoint& theta, CounterRng& rng) const;
  // Finite models: index of a draw.
  std::size_t DrawIndex(const ParamPoint& theta, CounterRng& rng) const;

  // Trace of the source Fisher information I_X(theta).
  double SourceFisherTrace(const ParamPoint& theta) const;
  // sup over unit u of E<u, S_theta(X)>^2, exact at one point.
  double ScoreVarianceAt(const ParamPoint& theta) const;

 private:
  StatModel(ModelKind kind, int d, double sigma0)
      : kind_(kind), d_(d), sigma0_(sigma0) {}

  ModelKind kind_;
  int d_;
  double sigma0_;
};

// Product of closed intervals with an optional sum constraint.
struct ParamDomain {
  std::vector<double> lo;
  std::vector<double> hi;
  std::optional<double> sum_budget;  // sum theta_j <= budget when set.

  static ParamDomain Cube(int d, double lo, double hi);
  static ParamDomain Centered(int d, double half_width);

  int dim() const { return static_cast<int>(lo.size()); }
  // Smallest per-coordinate half-width; B for centred cubes.
  double HalfWidth() const;
  void Validate() const;
  bool Contains(const ParamPoint& theta, double tol = 1e-12) const;
  ParamPoint Center() const;

  // Full product grid for d <= 3, otherwise the diagonal slice
  // lo + t (hi - lo). resolution 0 selects 17 or 9 respectively.
  std::vector<ParamPoint> Grid(int resolution = 0) const;
};

// Upper bound on sup over the domain grid and unit u of E<u, S>^2.
double ScoreVarianceSup(const StatModel& model, const ParamDomain& domain,
                        int grid_resolution = 0);

// sigma^2 with E exp((<u,S>/sigma)^2) <= 2 for all unit u over the domain.
// Bernoulli results are checked by exact enumeration when d <= 16.
double SubgaussianParam(const StatModel& model, const ParamDomain& domain);

// E exp((<u,S_theta(X)>)^2 / sigma2) by enumeration (finite models).
double SubgaussianMoment(const StatModel& model, const ParamPoint& theta,
                         std::span<const double> u, double sigma2);

}  // namespace ldpfisher

#endif  // LDPFISHER_MODELS_H_
