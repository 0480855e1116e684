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

#include "ldpfisher/serialization.h"

#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ldpfisher/estimators.h"

namespace ldpfisher {
namespace {

// JSON has no infinity; unbounded levels are written as null.
Json EpsToJson(double eps) {
  return std::isfinite(eps) ? Json(eps) : Json(nullptr);
}

}  // namespace

Json ChannelToJson(const FiniteChannel& channel) {
  return Json{{"nx", channel.input_size()},
              {"ny", channel.output_size()},
              {"kernel", channel.kernel()},
              {"eps", EpsToJson(channel.eps_nominal())},
              {"label", channel.label()}};
}

FiniteChannel ChannelFromJson(const Json& json) {
  const auto nx = Require<std::size_t>(json, "nx");
  const auto ny = Require<std::size_t>(json, "ny");
  auto kernel = Require<std::vector<double>>(json, "kernel");
  if (kernel.size() != nx * ny) {
    throw DimensionMismatchError("kernel must hold nx * ny entries");
  }
  const std::string label = Optional<std::string>(json, "label", "");
  if (!json.contains("eps")) {
    return FiniteChannel::Certified(nx, ny, std::move(kernel), label);
  }
  const double eps = json.at("eps").is_null()
                         ? std::numeric_limits<double>::infinity()
                         : Require<double>(json, "eps");
  return FiniteChannel(nx, ny, std::move(kernel), eps, label);
}

FiniteChannel ChannelFromSpec(const Json& spec, std::size_t size) {
  const std::string kind = Require<std::string>(spec, "kind");
  if (kind == "krr") {
    return MakeKrr(static_cast<int>(size), Require<double>(spec, "eps")).Materialize();
  }
  if (kind == "yebarg") {
    const double eps = Require<double>(spec, "eps");
    const int d = static_cast<int>(size);
    const int w = Optional<int>(spec, "w", ChooseW(d, eps));
    return MakeYeBarg(d, w, eps).Materialize();
  }
  if (kind == "subsample_krr") {
    if (!std::has_single_bit(size)) {
      throw ConfigError("subsample_krr needs a Bernoulli product model");
    }
    const int d = std::countr_zero(size);
    return SubsampleKrrChannel::WithK(d, Require<int>(spec, "k"),
                                      Require<double>(spec, "eps"))
        .Materialize();
  }
  if (kind == "identity") return IdentityChannel(size);
  if (kind == "uniform") {
    return UniformChannel(size, Optional<std::size_t>(spec, "ny", size));
  }
  if (kind == "random") {
    CounterRng rng(Optional<std::uint64_t>(spec, "seed", 1));
    return RandomLdpChannel(size, Optional<std::size_t>(spec, "ny", size),
                            Require<double>(spec, "eps"), rng);
  }
  if (kind == "kernel") {
    Json full = spec;
    full["nx"] = size;
    return ChannelFromJson(full);
  }
  throw ConfigError("unknown channel kind: " + kind);
}

StatModel ModelFromJson(const Json& json) {
  const std::string kind = Require<std::string>(json, "kind");
  const int d = Require<int>(json, "d");
  if (kind == "bernoulli") return StatModel::BernoulliProduct(d);
  if (kind == "multinomial") return StatModel::Multinomial(d);
  if (kind == "gaussian") {
    return StatModel::GaussianLocation(d, Optional<double>(json, "sigma0", 1.0));
  }
  throw ConfigError("unknown model kind: " + kind);
}

Json ModelToJson(const StatModel& model) {
  Json json{{"kind", model.kind() == ModelKind::kBernoulliProduct ? "bernoulli"
                     : model.kind() == ModelKind::kMultinomial    ? "multinomial"
                                                                  : "gaussian"},
            {"d", model.dim()}};
  if (model.kind() == ModelKind::kGaussianLocation) json["sigma0"] = model.sigma0();
  return json;
}

ParamDomain DefaultDomain(const StatModel& model, double s, double half_width) {
  const int d = model.dim();
  switch (model.kind()) {
    case ModelKind::kMultinomial:
      return ParamDomain::Cube(d, 1.0 / (4.0 * d), 1.0 / (2.0 * d));
    case ModelKind::kBernoulliProduct: {
      if (!(s > 0.0 && s <= d)) throw ConfigError("sparsity s must lie in (0, d]");
      ParamDomain domain = ParamDomain::Cube(d, s / (2.0 * d), s / d);
      domain.sum_budget = s;
      return domain;
    }
    case ModelKind::kGaussianLocation:
      return ParamDomain::Centered(d, half_width);
  }
  throw ConfigError("unknown model kind");
}

ParamDomain DomainFromJson(const Json& json, const StatModel& model,
                           double s) {
  if (json.is_object() && json.contains("lo")) {
    ParamDomain domain;
    domain.lo = Require<std::vector<double>>(json, "lo");
    domain.hi = Require<std::vector<double>>(json, "hi");
    if (json.contains("sum_budget")) domain.sum_budget = Require<double>(json, "sum_budget");
    domain.Validate();
    if (domain.dim() != model.dim()) {
      throw DimensionMismatchError("domain and model dimensions differ");
    }
    return domain;
  }
  return DefaultDomain(model, s, Optional<double>(json, "half_width", 1.0));
}

Json LowerBoundToJson(const LowerBoundReport& report) {
  return Json{{"model", report.model},
              {"d", report.d},
              {"n", report.n},
              {"eps", report.eps},
              {"half_width", report.half_width},
              {"i0", report.i0},
              {"sigma2", report.sigma2},
              {"classical_trace", report.classical_trace},
              {"sup_trace", report.sup_trace},
              {"binding_bound", report.binding_bound},
              {"van_trees_value", report.van_trees_value},
              {"corollary", report.corollary},
              {"condition_ok", report.condition_ok}};
}

Json TranscriptTraceToJson(const TranscriptTrace& trace) {
  return Json{{"trace", trace.trace},
              {"per_node_sum", trace.per_node_sum},
              {"max_log_ratio", trace.max_log_ratio},
              {"transcripts", trace.transcripts}};
}

}  // namespace ldpfisher
