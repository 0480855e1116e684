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

#include "ldpfisher/models.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "ldpfisher/errors.h"

namespace ldpfisher {
namespace {

constexpr int kMaxEnumerableBernoulliDim = 24;

void CheckDim(const ParamPoint& theta, int d) {
  if (static_cast<int>(theta.size()) != d) {
    throw DimensionMismatchError("parameter has " +
                                 std::to_string(theta.size()) +
                                 " coordinates, model expects " +
                                 std::to_string(d));
  }
}

double MultinomialLast(const ParamPoint& theta) {
  return 1.0 - std::accumulate(theta.begin(), theta.end(), 0.0);
}

// Optimal sub-Gaussian variance proxy of a centred Bernoulli(p).
double KearnsSaulProxy(double p) {
  if (std::abs(p - 0.5) < 1e-9) return 0.25;
  return (1.0 - 2.0 * p) / (2.0 * std::log((1.0 - p) / p));
}

std::vector<double> Linspace(double lo, double hi, int r) {
  std::vector<double> out(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    out[static_cast<std::size_t>(i)] =
        r == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (r - 1);
  }
  return out;
}

}  // namespace

StatModel StatModel::BernoulliProduct(int d) {
  if (d < 1) throw ArgumentDomainError("bernoulli_product needs d >= 1");
  return StatModel(ModelKind::kBernoulliProduct, d, 0.0);
}

StatModel StatModel::Multinomial(int d) {
  if (d < 1) throw ArgumentDomainError("multinomial needs d >= 1");
  return StatModel(ModelKind::kMultinomial, d, 0.0);
}

StatModel StatModel::GaussianLocation(int d, double sigma0) {
  if (d < 1) throw ArgumentDomainError("gaussian_location needs d >= 1");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
    throw ArgumentDomainError("gaussian_location needs sigma0 > 0");
  }
  return StatModel(ModelKind::kGaussianLocation, d, sigma0);
}

std::string StatModel::name() const {
  switch (kind_) {
    case ModelKind::kBernoulliProduct:
      return "bernoulli_product";
    case ModelKind::kMultinomial:
      return "multinomial";
    case ModelKind::kGaussianLocation:
      return "gaussian_location";
  }
  return "unknown";
}

std::size_t StatModel::SampleSpaceSize() const {
  switch (kind_) {
    case ModelKind::kBernoulliProduct:
      if (d_ > kMaxEnumerableBernoulliDim) {
        throw CapExceededError("bernoulli sample space too large to enumerate");
      }
      return std::size_t{1} << d_;
    case ModelKind::kMultinomial:
      return static_cast<std::size_t>(d_) + 1;
    case ModelKind::kGaussianLocation:
      break;
  }
  throw UnsupportedError("gaussian sample space is not finite");
}

Sample StatModel::PointAt(std::size_t index) const {
  if (index >= SampleSpaceSize()) {
    throw ArgumentDomainError("sample index out of range");
  }
  if (kind_ == ModelKind::kMultinomial) {
    return {static_cast<double>(index + 1)};
  }
  Sample x(static_cast<std::size_t>(d_));
  for (int j = 0; j < d_; ++j) x[static_cast<std::size_t>(j)] = (index >> j) & 1U;
  return x;
}

std::size_t StatModel::IndexOf(const Sample& x) const {
  if (kind_ == ModelKind::kMultinomial) {
    if (x.size() != 1 || x[0] < 1 || x[0] > d_ + 1 ||
        x[0] != std::floor(x[0])) {
      throw ArgumentDomainError("multinomial sample must be a category 1..d+1");
    }
    return static_cast<std::size_t>(x[0]) - 1;
  }
  if (kind_ == ModelKind::kBernoulliProduct) {
    if (static_cast<int>(x.size()) != d_) {
      throw DimensionMismatchError("bernoulli sample has wrong length");
    }
    std::size_t index = 0;
    for (int j = 0; j < d_; ++j) {
      const double v = x[static_cast<std::size_t>(j)];
      if (v != 0.0 && v != 1.0) {
        throw ArgumentDomainError("bernoulli sample entries must be 0 or 1");
      }
      if (v == 1.0) index |= std::size_t{1} << j;
    }
    return index;
  }
  throw UnsupportedError("gaussian samples have no index");
}

void StatModel::CheckClosed(const ParamPoint& theta) const {
  CheckDim(theta, d_);
  for (double t : theta) {
    if (!std::isfinite(t)) throw ArgumentDomainError("non-finite parameter");
  }
  if (kind_ == ModelKind::kGaussianLocation) return;
  for (double t : theta) {
    if (t < 0.0 || t > 1.0) {
      throw ArgumentDomainError("parameter outside [0, 1]");
    }
  }
  if (kind_ == ModelKind::kMultinomial && MultinomialLast(theta) < -1e-12) {
    throw ArgumentDomainError("multinomial parameters sum above 1");
  }
}

void StatModel::CheckInterior(const ParamPoint& theta) const {
  CheckClosed(theta);
  if (kind_ == ModelKind::kGaussianLocation) return;
  for (double t : theta) {
    if (t <= kSingularityGuard || t >= 1.0 - kSingularityGuard) {
      throw SingularParameterError("parameter at a score singularity");
    }
  }
  if (kind_ == ModelKind::kMultinomial &&
      MultinomialLast(theta) <= kSingularityGuard) {
    throw SingularParameterError("derived multinomial coordinate at 0");
  }
}

double StatModel::MassAt(const ParamPoint& theta, std::size_t index) const {
  if (kind_ == ModelKind::kMultinomial) {
    if (index < static_cast<std::size_t>(d_)) return theta[index];
    return std::max(0.0, MultinomialLast(theta));
  }
  if (kind_ == ModelKind::kBernoulliProduct) {
    double p = 1.0;
    for (int j = 0; j < d_; ++j) {
      const double t = theta[static_cast<std::size_t>(j)];
      p *= ((index >> j) & 1U) ? t : 1.0 - t;
    }
    return p;
  }
  throw UnsupportedError("gaussian model has no mass function");
}

double StatModel::Density(const ParamPoint& theta, const Sample& x) const {
  CheckClosed(theta);
  if (kind_ != ModelKind::kGaussianLocation) return MassAt(theta, IndexOf(x));
  if (static_cast<int>(x.size()) != d_) {
    throw DimensionMismatchError("gaussian sample has wrong length");
  }
  const double var = sigma0_ * sigma0_;
  double log_density = 0.0;
  for (int j = 0; j < d_; ++j) {
    const double z = x[static_cast<std::size_t>(j)] - theta[static_cast<std::size_t>(j)];
    log_density += -0.5 * z * z / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
  }
  return std::exp(log_density);
}

std::vector<double> StatModel::Pmf(const ParamPoint& theta) const {
  CheckClosed(theta);
  const std::size_t size = SampleSpaceSize();
  std::vector<double> pmf(size);
  for (std::size_t i = 0; i < size; ++i) pmf[i] = MassAt(theta, i);
  return pmf;
}

ScoreVector StatModel::ScoreAt(const ParamPoint& theta,
                               std::size_t index) const {
  CheckInterior(theta);
  ScoreVector s(static_cast<std::size_t>(d_), 0.0);
  if (kind_ == ModelKind::kBernoulliProduct) {
    for (int j = 0; j < d_; ++j) {
      const double t = theta[static_cast<std::size_t>(j)];
      s[static_cast<std::size_t>(j)] = ((index >> j) & 1U) ? 1.0 / t : -1.0 / (1.0 - t);
    }
  } else if (kind_ == ModelKind::kMultinomial) {
    if (index < static_cast<std::size_t>(d_)) {
      s[index] = 1.0 / theta[index];
    } else {
      std::fill(s.begin(), s.end(), -1.0 / MultinomialLast(theta));
    }
  } else {
    throw UnsupportedError("gaussian model has no indexed sample space");
  }
  return s;
}

ScoreVector StatModel::Score(const ParamPoint& theta, const Sample& x) const {
  if (kind_ != ModelKind::kGaussianLocation) return ScoreAt(theta, IndexOf(x));
  CheckInterior(theta);
  if (static_cast<int>(x.size()) != d_) {
    throw DimensionMismatchError("gaussian sample has wrong length");
  }
  ScoreVector s(static_cast<std::size_t>(d_));
  for (std::size_t j = 0; j < s.size(); ++j) {
    s[j] = (x[j] - theta[j]) / (sigma0_ * sigma0_);
  }
  return s;
}

std::size_t StatModel::DrawIndex(const ParamPoint& theta,
                                 CounterRng& rng) const {
  if (kind_ == ModelKind::kBernoulliProduct) {
    if (d_ > 63) throw CapExceededError("bernoulli index needs d <= 63");
    std::size_t index = 0;
    for (int j = 0; j < d_; ++j) {
      if (rng.Uniform() < theta[static_cast<std::size_t>(j)]) {
        index |= std::size_t{1} << j;
      }
    }
    return index;
  }
  if (kind_ == ModelKind::kMultinomial) {
    const double u = rng.Uniform();
    double cumulative = 0.0;
    for (int j = 0; j < d_; ++j) {
      cumulative += theta[static_cast<std::size_t>(j)];
      if (u < cumulative) return static_cast<std::size_t>(j);
    }
    return static_cast<std::size_t>(d_);
  }
  throw UnsupportedError("gaussian draws have no index");
}

Sample StatModel::Draw(const ParamPoint& theta, CounterRng& rng) const {
  CheckClosed(theta);
  if (kind_ == ModelKind::kGaussianLocation) {
    Sample x(static_cast<std::size_t>(d_));
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = theta[j] + sigma0_ * rng.Normal();
    }
    return x;
  }
  if (kind_ == ModelKind::kBernoulliProduct) {
    Sample x(static_cast<std::size_t>(d_));
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = rng.Uniform() < theta[j] ? 1.0 : 0.0;
    }
    return x;
  }
  return PointAt(DrawIndex(theta, rng));
}

double StatModel::SourceFisherTrace(const ParamPoint& theta) const {
  CheckInterior(theta);
  double trace = 0.0;
  switch (kind_) {
    case ModelKind::kBernoulliProduct:
      for (double t : theta) trace += 1.0 / (t * (1.0 - t));
      return trace;
    case ModelKind::kMultinomial: {
      const double last = MultinomialLast(theta);
      for (double t : theta) trace += 1.0 / t + 1.0 / last;
      return trace;
    }
    case ModelKind::kGaussianLocation:
      return d_ / (sigma0_ * sigma0_);
  }
  return trace;
}

double StatModel::ScoreVarianceAt(const ParamPoint& theta) const {
  CheckInterior(theta);
  switch (kind_) {
    case ModelKind::kBernoulliProduct: {
      double best = 0.0;
      for (double t : theta) best = std::max(best, 1.0 / (t * (1.0 - t)));
      return best;
    }
    case ModelKind::kMultinomial: {
      // Cov = diag(1/theta) + 1 1^T / theta_{d+1}.
      const double last = MultinomialLast(theta);
      Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(d_, d_, 1.0 / last);
      double max_inv = 0.0;
      for (int j = 0; j < d_; ++j) {
        cov(j, j) += 1.0 / theta[static_cast<std::size_t>(j)];
        max_inv = std::max(max_inv, 1.0 / theta[static_cast<std::size_t>(j)]);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
          cov, Eigen::EigenvaluesOnly);
      const double eig = solver.eigenvalues().maxCoeff() * (1.0 + 1e-12);
      return std::min(eig, max_inv + d_ / last);
    }
    case ModelKind::kGaussianLocation:
      return 1.0 / (sigma0_ * sigma0_);
  }
  return 0.0;
}

ParamDomain ParamDomain::Cube(int d, double lo, double hi) {
  ParamDomain domain;
  domain.lo.assign(static_cast<std::size_t>(d), lo);
  domain.hi.assign(static_cast<std::size_t>(d), hi);
  domain.Validate();
  return domain;
}

ParamDomain ParamDomain::Centered(int d, double half_width) {
  return Cube(d, -half_width, half_width);
}

double ParamDomain::HalfWidth() const {
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < lo.size(); ++j) b = std::min(b, 0.5 * (hi[j] - lo[j]));
  return b;
}

void ParamDomain::Validate() const {
  if (lo.empty() || lo.size() != hi.size()) {
    throw DimensionMismatchError("domain bounds must be non-empty and aligned");
  }
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (!(lo[j] < hi[j]) || !std::isfinite(lo[j]) || !std::isfinite(hi[j])) {
      throw ArgumentDomainError("domain needs lo < hi in every coordinate");
    }
  }
  if (sum_budget && !(*sum_budget > 0.0)) {
    throw ArgumentDomainError("sum budget must be positive");
  }
}

bool ParamDomain::Contains(const ParamPoint& theta, double tol) const {
  if (theta.size() != lo.size()) return false;
  double sum = 0.0;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (theta[j] < lo[j] - tol || theta[j] > hi[j] + tol) return false;
    sum += theta[j];
  }
  return !sum_budget || sum <= *sum_budget + tol;
}

ParamPoint ParamDomain::Center() const {
  ParamPoint c(lo.size());
  for (std::size_t j = 0; j < lo.size(); ++j) c[j] = 0.5 * (lo[j] + hi[j]);
  return c;
}

std::vector<ParamPoint> ParamDomain::Grid(int resolution) const {
  Validate();
  const int d = dim();
  const bool full = d <= 3;
  const int r = resolution > 0 ? resolution : (full ? 17 : 9);
  if (r < 2) throw ArgumentDomainError("grid resolution must be >= 2");
  std::vector<ParamPoint> points;
  if (full) {
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(r);
    for (std::size_t idx = 0; idx < total; ++idx) {
      ParamPoint p(static_cast<std::size_t>(d));
      std::size_t rest = idx;
      for (int j = 0; j < d; ++j) {
        const auto i = static_cast<int>(rest % static_cast<std::size_t>(r));
        rest /= static_cast<std::size_t>(r);
        const auto k = static_cast<std::size_t>(j);
        p[k] = lo[k] + (hi[k] - lo[k]) * static_cast<double>(i) / (r - 1);
      }
      if (Contains(p)) points.push_back(std::move(p));
    }
  } else {
    for (double t : Linspace(0.0, 1.0, r)) {
      ParamPoint p(static_cast<std::size_t>(d));
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = lo[k] + t * (hi[k] - lo[k]);
      if (Contains(p)) points.push_back(std::move(p));
    }
  }
  return points;
}

double ScoreVarianceSup(const StatModel& model, const ParamDomain& domain,
                        int grid_resolution) {
  if (grid_resolution == 1 || grid_resolution < 0) {
    throw ArgumentDomainError("grid resolution must be >= 2");
  }
  if (domain.dim() != model.dim()) {
    throw DimensionMismatchError("domain and model dimensions differ");
  }
  if (model.kind() == ModelKind::kGaussianLocation) {
    return 1.0 / (model.sigma0() * model.sigma0());
  }
  if (model.kind() == ModelKind::kBernoulliProduct) {
    // Coordinates are independent: the supremum is the largest diagonal
    // variance, maximised per coordinate over its own interval grid.
    const int r = grid_resolution > 0 ? grid_resolution : 17;
    double best = 0.0;
    for (int j = 0; j < model.dim(); ++j) {
      const auto k = static_cast<std::size_t>(j);
      for (double t : Linspace(domain.lo[k], domain.hi[k], r)) {
        if (t <= kSingularityGuard || t >= 1.0 - kSingularityGuard) {
          throw SingularParameterError("domain grid touches a singularity");
        }
        best = std::max(best, 1.0 / (t * (1.0 - t)));
      }
    }
    return best;
  }
  double best = 0.0;
  for (const ParamPoint& theta : domain.Grid(grid_resolution)) {
    best = std::max(best, model.ScoreVarianceAt(theta));
  }
  return best;
}

double SubgaussianMoment(const StatModel& model, const ParamPoint& theta,
                         std::span<const double> u, double sigma2) {
  if (!model.is_finite()) {
    throw UnsupportedError("enumerated moment needs a finite model");
  }
  if (static_cast<int>(u.size()) != model.dim()) {
    throw DimensionMismatchError("direction has wrong length");
  }
  model.CheckInterior(theta);
  const std::size_t size = model.SampleSpaceSize();
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double mass = model.MassAt(theta, i);
    if (mass == 0.0) continue;
    const ScoreVector s = model.ScoreAt(theta, i);
    double inner = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) inner += u[j] * s[j];
    total += mass * std::exp(inner * inner / sigma2);
  }
  return total;
}

double SubgaussianParam(const StatModel& model, const ParamDomain& domain) {
  if (domain.dim() != model.dim()) {
    throw DimensionMismatchError("domain and model dimensions differ");
  }
  if (model.kind() == ModelKind::kMultinomial) {
    throw UnsupportedError("sub-Gaussian parameter not provided for multinomial");
  }
  if (model.kind() == ModelKind::kGaussianLocation) {
    // <u,S> ~ N(0, 1/sigma0^2): E exp(Z^2/s2) = (1 - 2/(sigma0^2 s2))^{-1/2}.
    return 8.0 / (3.0 * model.sigma0() * model.sigma0());
  }
  // Score_j = (X_j - theta_j) / (theta_j (1 - theta_j)) has MGF proxy
  // v_j = kappa(theta_j) / (theta_j (1 - theta_j))^2; independence gives
  // proxy max_j v_j for every unit u, and E exp(Z^2/t^2) <= (1-2v/t^2)^{-1/2}
  // equals 2 at t^2 = 8v/3.
  double v = 0.0;
  for (int j = 0; j < model.dim(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    for (double t : Linspace(domain.lo[k], domain.hi[k], 17)) {
      if (t <= kSingularityGuard || t >= 1.0 - kSingularityGuard) {
        throw SingularParameterError("domain touches a singularity");
      }
      const double var = t * (1.0 - t);
      v = std::max(v, KearnsSaulProxy(t) / (var * var));
    }
  }
  double sigma2 = 8.0 * v / 3.0;
  if (model.dim() > 16) return sigma2;

  // Enumeration check on axis, diagonal and pseudo-random directions.
  const int d = model.dim();
  std::vector<std::vector<double>> directions;
  for (int j = 0; j < d; ++j) {
    std::vector<double> e(static_cast<std::size_t>(d), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    directions.push_back(std::move(e));
  }
  directions.emplace_back(static_cast<std::size_t>(d), 1.0 / std::sqrt(d));
  CounterRng rng(0x5eedULL);
  for (int r = 0; r < 6; ++r) {
    std::vector<double> u(static_cast<std::size_t>(d));
    double norm = 0.0;
    for (double& x : u) {
      x = rng.Normal();
      norm += x * x;
    }
    for (double& x : u) x /= std::sqrt(norm);
    directions.push_back(std::move(u));
  }
  const std::vector<ParamPoint> points = domain.Grid(3);
  for (int attempt = 0; attempt < 50; ++attempt) {
    bool ok = true;
    for (const ParamPoint& theta : points) {
      for (const auto& u : directions) {
        if (SubgaussianMoment(model, theta, u, sigma2) > 2.0) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return sigma2;
    sigma2 *= 1.05;
  }
  throw UnsupportedError("could not certify a sub-Gaussian parameter");
}

}  // namespace ldpfisher
