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

// Command-line front end: bounds, fisher, simulate, verify, estimate.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ldpfisher/errors.h"
#include "ldpfisher/fisher.h"
#include "ldpfisher/harness.h"
#include "ldpfisher/oracle.h"
#include "ldpfisher/protocols.h"
#include "ldpfisher/serialization.h"

namespace {

using ldpfisher::Json;
using ldpfisher::Optional;
using ldpfisher::Require;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ldpfisher::ConfigError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Json ReadConfig(const std::string& path) {
  if (path.empty()) return Json::object();
  try {
    return Json::parse(ReadFile(path), nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ldpfisher::ConfigError("cannot parse " + path + ": " + e.what());
  }
}

void Emit(const Json& result, const std::string& out_dir,
          const std::string& file) {
  std::cout << result.dump(2) << '\n';
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write to " + out_dir);
  out << result.dump(2) << '\n';
}

template <typename T>
std::vector<T> List(const Json& json, const char* key) {
  if (json.contains(key) && json.at(key).is_array()) {
    return Require<std::vector<T>>(json, key);
  }
  return {Require<T>(json, key)};
}

Json RunBounds(const Json& config) {
  const ldpfisher::StatModel model = ldpfisher::ModelFromJson(Require<Json>(config, "model"));
  const double s = Optional<double>(config, "s", 1.0);
  const ldpfisher::ParamDomain domain = ldpfisher::DomainFromJson(
      Optional<Json>(config, "domain", Json::object()), model, s);
  Json rows = Json::array();
  for (double n : List<double>(config, "n")) {
    for (double eps : List<double>(config, "eps")) {
      rows.push_back(ldpfisher::LowerBoundToJson(
          ldpfisher::MinimaxLowerBound(model, domain, n, eps)));
    }
  }
  return rows;
}

Json RunFisher(const Json& config) {
  const ldpfisher::StatModel model = ldpfisher::ModelFromJson(Require<Json>(config, "model"));
  const auto theta = Require<ldpfisher::ParamPoint>(config, "theta");
  Json result{{"model", ldpfisher::ModelToJson(model)}, {"theta", theta}};
  const double i0 = model.ScoreVarianceAt(theta);
  result["i0"] = i0;
  if (config.contains("channel")) {
    const ldpfisher::FiniteChannel channel =
        ldpfisher::ChannelFromSpec(config.at("channel"), model.SampleSpaceSize());
    const double eps = ldpfisher::ValidateEps(channel);
    const double trace = ldpfisher::TraceFisherExact(model, channel, theta);
    result["validate_eps"] = std::isfinite(eps) ? Json(eps) : Json(nullptr);
    result["trace_exact"] = trace;
    try {
      result["trace_finite_difference"] =
          ldpfisher::oracle::FiniteDiffTrace(model, channel, theta);
    } catch (const ldpfisher::ArgumentDomainError&) {
      result["trace_finite_difference"] = nullptr;
    }
    if (std::isfinite(eps)) {
      const double bound = ldpfisher::VarianceFisherBound(i0, eps);
      result["variance_bound"] = bound;
      result["bound_ok"] = trace <= bound + 1e-9;
    }
  }
  if (config.contains("protocol")) {
    const Json& spec = config.at("protocol");
    const ldpfisher::Protocol protocol = ldpfisher::MakeProtocol(
        Require<std::string>(spec, "template"), Require<int>(spec, "nodes"),
        Optional<int>(spec, "rounds", 1), static_cast<int>(model.SampleSpaceSize()),
        Require<double>(spec, "eps"));
    const ldpfisher::TranscriptTrace trace =
        ldpfisher::TranscriptTraceExact(protocol, model, theta);
    Json out = ldpfisher::TranscriptTraceToJson(trace);
    const double bound = protocol.nodes * ldpfisher::VarianceFisherBound(i0, protocol.eps);
    out["bound"] = bound;
    out["bound_ok"] = trace.trace <= bound + 1e-9;
    if (protocol.rounds == 1) {
      const ldpfisher::ChainRuleSides sides =
          ldpfisher::VerifyChainRule(protocol, model, theta);
      out["chain_rule"] = {{"lhs", sides.lhs}, {"rhs", sides.rhs}};
    }
    result["protocol"] = out;
  }
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ldpfisher: Fisher-information bounds and mechanisms for local differential privacy"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string records_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "Output directory");
  };
  CLI::App* bounds = app.add_subcommand("bounds", "Minimax lower bounds for a model");
  add_common(bounds);
  CLI::App* fisher = app.add_subcommand("fisher", "Exact Fisher traces and bound checks");
  add_common(fisher);
  CLI::App* simulate = app.add_subcommand("simulate", "Empirical risk sweeps");
  add_common(simulate);
  simulate->add_option("--seed", seed, "Seed (overrides the config)");
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");
  CLI::App* verify = app.add_subcommand("verify", "Oracle and property checks");
  verify->add_option("--seed", seed, "Seed for the random instances");
  CLI::App* estimate = app.add_subcommand("estimate", "Decode report records");
  add_common(estimate);
  estimate->add_option("--records", records_path, "CSV of node,phase,symbol")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (bounds->parsed()) {
      Emit(RunBounds(ReadConfig(config_path)), out_dir, "bounds.json");
    } else if (fisher->parsed()) {
      Emit(RunFisher(ReadConfig(config_path)), out_dir, "fisher.json");
    } else if (simulate->parsed()) {
      Json json = ReadConfig(config_path);
      if (seed) json["seed"] = *seed;
      if (threads > 0) json["threads"] = threads;
      if (!out_dir.empty()) json["output_dir"] = out_dir;
      const auto config = ldpfisher::ExperimentConfig::FromJson(json);
      const ldpfisher::RiskReport report = ldpfisher::RunExperiment(config);
      std::cout << report.SummaryTable();
    } else if (verify->parsed()) {
      bool ok = true;
      for (const auto& check : ldpfisher::RunVerification(seed.value_or(1))) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": "
                  << check.detail << '\n';
        ok = ok && check.passed;
      }
      return ok ? 0 : 1;
    } else if (estimate->parsed()) {
      const Json config = ReadConfig(config_path);
      const auto records = ldpfisher::ParseRecordsCsv(ReadFile(records_path));
      Emit(Json{{"estimate", ldpfisher::EstimateFromRecords(config, records)}},
           out_dir, "estimate.json");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
