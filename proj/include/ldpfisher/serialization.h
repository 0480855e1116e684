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

#ifndef LDPFISHER_SERIALIZATION_H_
#define LDPFISHER_SERIALIZATION_H_

#include <string>

#include "json.hpp"
#include "ldpfisher/channels.h"
#include "ldpfisher/errors.h"
#include "ldpfisher/fisher.h"
#include "ldpfisher/models.h"
#include "ldpfisher/protocols.h"

namespace ldpfisher {

using Json = nlohmann::json;

// {"nx", "ny", "kernel" (row-major), "eps", "label"}. Parsing re-validates
// the kernel; a missing "eps" certifies it at its own level.
Json ChannelToJson(const FiniteChannel& channel);
FiniteChannel ChannelFromJson(const Json& json);

// Channel from a spec: {"kind": "krr"|"yebarg"|"subsample_krr"|"identity"|
// "uniform"|"kernel", ...}. size is the model's sample-space size.
FiniteChannel ChannelFromSpec(const Json& spec, std::size_t size);

// {"kind": "bernoulli"|"multinomial"|"gaussian", "d", "sigma0"}.
StatModel ModelFromJson(const Json& json);
Json ModelToJson(const StatModel& model);

// {"lo", "hi", "sum_budget"} or {"half_width"} or a corollary default when
// the object is empty.
ParamDomain DomainFromJson(const Json& json, const StatModel& model,
                           double s);
// Default domain of each corollary setting: multinomial [1/(4d), 1/(2d)]^d,
// Bernoulli [s/(2d), s/d]^d with budget s, Gaussian [-B, B]^d.
ParamDomain DefaultDomain(const StatModel& model, double s, double half_width);

Json LowerBoundToJson(const LowerBoundReport& report);
Json TranscriptTraceToJson(const TranscriptTrace& trace);

// Reads a required field with a ConfigError naming it when absent or of the
// wrong type.
template <typename T>
T Require(const Json& json, const char* key) {
  if (!json.is_object() || !json.contains(key)) {
    throw ConfigError(std::string("missing config field: ") + key);
  }
  try {
    return json.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad type for config field: ") + key);
  }
}

template <typename T>
T Optional(const Json& json, const char* key, T fallback) {
  if (!json.is_object() || !json.contains(key) || json.at(key).is_null()) {
    return fallback;
  }
  return Require<T>(json, key);
}

}  // namespace ldpfisher

#endif  // LDPFISHER_SERIALIZATION_H_
