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

#include "ldpfisher/harness.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "ldpfisher/combinatorics.h"
#include "ldpfisher/errors.h"
#include "ldpfisher/fisher.h"
#include "ldpfisher/oracle.h"
#include "ldpfisher/protocols.h"

namespace ldpfisher {
namespace {

const std::vector<std::pair<Mechanism, std::string>>& MechanismNames() {
  static const std::vector<std::pair<Mechanism, std::string>> names = {
      {Mechanism::kFrequency, "frequency"},
      {Mechanism::kYeBarg, "yebarg"},
      {Mechanism::kKrr, "krr"},
      {Mechanism::kSparseBernoulli, "sparse_bernoulli"},
      {Mechanism::kTwoPhase, "two_phase"},
      {Mechanism::kSubsampleKrr, "subsample_krr"},
      {Mechanism::kGaussianRr, "gaussian_rr"},
  };
  return names;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double PrivacyFactor(double eps) {
  return std::min(std::expm1(eps) * std::expm1(eps), std::exp(eps));
}

double SquaredError(std::span<const double> estimate,
                    std::span<const double> truth) {
  double loss = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double diff = estimate[i] - truth[i];
    loss += diff * diff;
  }
  return loss;
}

// Categorical sampler by inverse CDF.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> p) : cdf_(p.size()) {
    std::partial_sum(p.begin(), p.end(), cdf_.begin());
  }
  int operator()(CounterRng& rng) const {
    const double u = rng.Uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(
        it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  }

 private:
  std::vector<double> cdf_;
};

BinaryMatrix DrawBernoulli(std::span<const double> theta, std::size_t n,
                           CounterRng& rng) {
  BinaryMatrix x(n, theta.size());
  for (std::size_t k = 0; k < n; ++k) {
    auto row = x.Row(k);
    for (std::size_t j = 0; j < theta.size(); ++j) row[j] = rng.Uniform() < theta[j];
  }
  return x;
}

TrialOutcome MultinomialTrial(const RowSpec& row, std::span<const double> p,
                              CounterRng& rng) {
  const int categories = row.d + 1;
  const CategoricalSampler sampler(p);
  std::vector<double> counts(static_cast<std::size_t>(categories), 0.0);
  const double n = static_cast<double>(row.n);
  std::vector<double> estimate;
  switch (row.mechanism) {
    case Mechanism::kFrequency: {
      for (std::size_t k = 0; k < row.n; ++k) counts[static_cast<std::size_t>(sampler(rng))] += 1.0;
      estimate.resize(counts.size());
      for (std::size_t i = 0; i < counts.size(); ++i) estimate[i] = counts[i] / n;
      break;
    }
    case Mechanism::kYeBarg: {
      const YeBargChannel channel(categories, ChooseW(categories, row.eps), row.eps);
      std::vector<int> subset;
      for (std::size_t k = 0; k < row.n; ++k) {
        channel.SampleInto(sampler(rng), rng, subset);
        for (int i : subset) counts[static_cast<std::size_t>(i)] += 1.0;
      }
      estimate = YeBargEstimateFromCounts(counts, n, categories, channel.w(), row.eps);
      break;
    }
    case Mechanism::kKrr: {
      const KrrChannel channel(categories, row.eps);
      for (std::size_t k = 0; k < row.n; ++k) {
        counts[static_cast<std::size_t>(channel.Sample(sampler(rng), rng))] += 1.0;
      }
      estimate = KrrFrequencyEstimate(counts, n, categories, row.eps);
      break;
    }
    default:
      throw UnsupportedError("not a multinomial mechanism");
  }
  return {SquaredError(estimate, p), false};
}

TrialOutcome SubsampleTrial(const RowSpec& row, const ExperimentConfig& config,
                            std::span<const double> theta, CounterRng& rng) {
  const SubsampleKrrChannel channel(row.d, row.eps, config.slack);
  const std::size_t m = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(config.mu_budget_fraction * row.n)), 1,
      row.n - 1);
  const KrrChannel norm_channel(row.d + 1, row.eps);
  std::vector<double> buckets(static_cast<std::size_t>(row.d) + 1, 0.0);
  std::vector<double> counts(static_cast<std::size_t>(row.d), 0.0);
  std::vector<std::uint8_t> x(static_cast<std::size_t>(row.d));
  for (std::size_t k = 0; k < row.n; ++k) {
    int ones = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = rng.Uniform() < theta[j];
      ones += x[j];
    }
    if (k < m) {
      buckets[static_cast<std::size_t>(norm_channel.Sample(ones, rng))] += 1.0;
    } else {
      for (int i : channel.Sample(x, rng)) counts[static_cast<std::size_t>(i)] += 1.0;
    }
  }
  SubsampleAggregatorState state;
  state.a = channel.a();
  state.b = channel.b();
  state.m = m;
  const double md = static_cast<double>(m);
  if (config.mu_target == "kept") {
    state.mu_r = {EstimateKeptRate(buckets, md, channel.k(), row.eps)};
  } else if (config.mu_target == "mean") {
    state.mu_r = {EstimateMeanRate(buckets, md, channel.k(), row.eps)};
  } else {
    state.mu_r = ExactCoordinateRates(theta, channel.k());
  }
  const std::vector<double> estimate =
      SubsampleKrrEstimate(counts, static_cast<double>(row.n - m), state);
  return {SquaredError(estimate, theta), false};
}

double ResolveClip(const ExperimentConfig& config) {
  return config.clip > 0.0 ? config.clip : config.half_width + 4.0 * config.sigma0;
}

template <typename T>
std::vector<T> ScalarOrList(const Json& json, const char* key,
                            std::vector<T> fallback) {
  if (!json.contains(key)) return fallback;
  if (json.at(key).is_array()) return Require<std::vector<T>>(json, key);
  return {Require<T>(json, key)};
}

}  // namespace

std::string MechanismName(Mechanism mechanism) {
  for (const auto& [m, name] : MechanismNames()) {
    if (m == mechanism) return name;
  }
  throw ConfigError("unknown mechanism");
}

Mechanism ParseMechanism(const std::string& name) {
  for (const auto& [m, known] : MechanismNames()) {
    if (known == name) return m;
  }
  throw ConfigError("unknown mechanism: " + name);
}

ModelKind MechanismModel(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kFrequency:
    case Mechanism::kYeBarg:
    case Mechanism::kKrr:
      return ModelKind::kMultinomial;
    case Mechanism::kGaussianRr:
      return ModelKind::kGaussianLocation;
    default:
      return ModelKind::kBernoulliProduct;
  }
}

ExperimentConfig ExperimentConfig::FromJson(const Json& json) {
  if (!json.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  std::vector<std::string> names;
  for (const auto& name : ScalarOrList<std::string>(json, "mechanism", {"yebarg"})) {
    names.push_back(name);
  }
  config.mechanisms.clear();
  for (const auto& name : names) config.mechanisms.push_back(ParseMechanism(name));
  config.d_grid = ScalarOrList<int>(json, "d", config.d_grid);
  config.s_grid = ScalarOrList<double>(json, "s", config.s_grid);
  config.eps_grid = ScalarOrList<double>(json, "eps", config.eps_grid);
  config.n_grid = ScalarOrList<std::size_t>(json, "n", config.n_grid);
  config.trials = Optional<int>(json, "trials", config.trials);
  config.seed = Optional<std::uint64_t>(json, "seed", config.seed);
  config.threads = Optional<int>(json, "threads", config.threads);
  config.output_dir = Optional<std::string>(json, "output_dir", config.output_dir);
  config.sigma0 = Optional<double>(json, "sigma0", config.sigma0);
  config.half_width = Optional<double>(json, "half_width", config.half_width);
  config.clip = Optional<double>(json, "clip", config.clip);
  config.slack = Optional<double>(json, "slack", config.slack);
  config.mu_budget_fraction =
      Optional<double>(json, "mu_budget_fraction", config.mu_budget_fraction);
  config.mu_target = Optional<std::string>(json, "mu_target", config.mu_target);
  if (json.contains("theta")) config.theta = Require<std::vector<double>>(json, "theta");
  if (json.contains("sparse")) {
    const Json& sparse = json.at("sparse");
    config.sparse.halving = Optional<bool>(sparse, "halving", config.sparse.halving);
    config.sparse.split = Optional<double>(sparse, "split", config.sparse.split);
    config.sparse.floor = Optional<double>(sparse, "floor", config.sparse.floor);
  }
  config.two_phase.sparse = config.sparse;
  if (json.contains("two_phase")) {
    const Json& two = json.at("two_phase");
    config.two_phase.phase1_fraction =
        Optional<double>(two, "phase1_fraction", config.two_phase.phase1_fraction);
    config.two_phase.group_cap = Optional<double>(two, "group_cap", config.two_phase.group_cap);
    config.two_phase.precision = Optional<double>(two, "precision", config.two_phase.precision);
  }
  if (json.contains("calibration")) {
    config.calibration = Require<std::map<std::string, double>>(json, "calibration");
  }
  config.Validate();
  return config;
}

Json ExperimentConfig::ToJson() const {
  std::vector<std::string> names;
  for (Mechanism m : mechanisms) names.push_back(MechanismName(m));
  Json json{{"mechanism", names},
            {"d", d_grid},
            {"s", s_grid},
            {"eps", eps_grid},
            {"n", n_grid},
            {"trials", trials},
            {"seed", seed},
            {"threads", threads},
            {"sigma0", sigma0},
            {"half_width", half_width},
            {"clip", clip},
            {"slack", slack},
            {"mu_budget_fraction", mu_budget_fraction},
            {"mu_target", mu_target},
            {"sparse", {{"halving", sparse.halving}, {"split", sparse.split}, {"floor", sparse.floor}}},
            {"two_phase",
             {{"phase1_fraction", two_phase.phase1_fraction},
              {"group_cap", two_phase.group_cap},
              {"precision", two_phase.precision}}},
            {"calibration", calibration}};
  if (!output_dir.empty()) json["output_dir"] = output_dir;
  if (theta) json["theta"] = *theta;
  return json;
}

void ExperimentConfig::Validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (mechanisms.empty() || d_grid.empty() || s_grid.empty() ||
      eps_grid.empty() || n_grid.empty()) {
    throw ConfigError("every sweep axis needs at least one value");
  }
  for (double eps : eps_grid) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("every eps must be finite and > 0");
  }
  for (std::size_t n : n_grid) {
    if (n < 2) throw ConfigError("n must be >= 2");
  }
  for (int d : d_grid) {
    if (d < 1) throw ConfigError("d must be >= 1");
  }
  if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be > 0");
  if (!(half_width > 0.0)) throw ConfigError("half_width must be > 0");
  if (clip < 0.0) throw ConfigError("clip must be >= 0");
  if (!(mu_budget_fraction > 0.0 && mu_budget_fraction < 1.0)) {
    throw ConfigError("mu_budget_fraction must lie in (0, 1)");
  }
  if (mu_target != "kept" && mu_target != "mean" && mu_target != "oracle") {
    throw ConfigError("mu_target must be kept, mean or oracle");
  }
  sparse.Validate();
  for (const auto& [name, c] : calibration) {
    ParseMechanism(name);
    if (!(c > 0.0)) throw ConfigError("calibration constants must be > 0");
  }
  for (const RowSpec& row : Rows()) {
    if (theta && static_cast<int>(theta->size()) != row.d) {
      throw ConfigError("theta must have d entries");
    }
    switch (row.mechanism) {
      case Mechanism::kSparseBernoulli:
        if (!(row.s > 0.0 && row.s <= 1.0)) {
          throw ConfigError("sparse_bernoulli rows need 0 < s <= 1");
        }
        break;
      case Mechanism::kTwoPhase:
        if (!(row.s > 0.0 && row.s <= row.d)) throw ConfigError("two_phase rows need 0 < s <= d");
        two_phase.Validate(row.d);
        break;
      case Mechanism::kSubsampleKrr:
        if (!(row.s > 0.0 && row.s <= row.d)) {
          throw ConfigError("subsample_krr rows need 0 < s <= d");
        }
        if (row.d < 2) throw ConfigError("subsample_krr rows need d >= 2");
        SelectK(row.d, row.eps, slack);
        break;
      default:
        break;
    }
  }
}

std::vector<RowSpec> ExperimentConfig::Rows() const {
  std::vector<RowSpec> rows;
  for (Mechanism m : mechanisms) {
    for (int d : d_grid) {
      for (double s : s_grid) {
        for (double eps : eps_grid) {
          for (std::size_t n : n_grid) rows.push_back({m, d, s, eps, n});
        }
      }
    }
  }
  return rows;
}

const std::map<std::string, double>& DefaultCalibration() {
  static const std::map<std::string, double> table = {
      {"frequency", 1.4},         {"yebarg", 12.0},    {"krr", 15.0},
      {"sparse_bernoulli", 43.0}, {"two_phase", 450.0}, {"subsample_krr", 3.5},
      {"gaussian_rr", 150.0},
  };
  return table;
}

std::vector<double> RowTheta(const RowSpec& row, const ExperimentConfig& config) {
  const auto d = static_cast<std::size_t>(row.d);
  std::vector<double> theta;
  if (config.theta) {
    theta = *config.theta;
  } else {
    switch (row.mechanism) {
      case Mechanism::kFrequency:
      case Mechanism::kYeBarg:
      case Mechanism::kKrr:
        theta.assign(d, 1.0 / (2.0 * row.d));
        break;
      case Mechanism::kSparseBernoulli:
        theta.assign(d, row.s / (2.0 * row.d));
        break;
      case Mechanism::kTwoPhase:
      case Mechanism::kSubsampleKrr:
        theta.assign(d, row.s / row.d);
        break;
      case Mechanism::kGaussianRr:
        theta.assign(d, config.half_width / 2.0);
        break;
    }
  }
  if (MechanismModel(row.mechanism) == ModelKind::kMultinomial) {
    const double rest = 1.0 - std::accumulate(theta.begin(), theta.end(), 0.0);
    if (rest < 0.0) throw ConfigError("multinomial theta sums above 1");
    theta.push_back(rest);
  }
  return theta;
}

double RateFormula(const RowSpec& row, const ExperimentConfig& config) {
  const double n = static_cast<double>(row.n);
  const double d = row.d;
  const double factor = PrivacyFactor(row.eps);
  switch (row.mechanism) {
    case Mechanism::kFrequency: {
      double sum_sq = 0.0;
      for (double p : RowTheta(row, config)) sum_sq += p * p;
      return (1.0 - sum_sq) / n;
    }
    case Mechanism::kYeBarg:
    case Mechanism::kKrr:
      return d / (n * factor);
    case Mechanism::kSparseBernoulli:
      return d / (n * std::min(factor, d));
    case Mechanism::kTwoPhase:
      return d * row.s / (n * factor);
    case Mechanism::kSubsampleKrr:
      return row.s * row.s * std::log(d) / (n * row.eps);
    case Mechanism::kGaussianRr:
      return config.sigma0 * config.sigma0 * d * d /
             (n * std::min(row.eps * row.eps, row.eps));
  }
  throw ConfigError("unknown mechanism");
}

LowerBoundReport RowLowerBound(const RowSpec& row,
                               const ExperimentConfig& config) {
  StatModel model = StatModel::Multinomial(row.d);
  switch (MechanismModel(row.mechanism)) {
    case ModelKind::kMultinomial:
      break;
    case ModelKind::kBernoulliProduct:
      model = StatModel::BernoulliProduct(row.d);
      break;
    case ModelKind::kGaussianLocation:
      model = StatModel::GaussianLocation(row.d, config.sigma0);
      break;
  }
  const ParamDomain domain = DefaultDomain(model, row.s, config.half_width);
  LowerBoundReport report = MinimaxLowerBound(model, domain,
                                              static_cast<double>(row.n), row.eps);
  if (row.mechanism == Mechanism::kFrequency) {
    // Non-private reference: only the classical information applies.
    report.sup_trace = report.classical_trace;
    report.binding_bound = "classical";
    report.corollary = "classical";
    const VanTreesResult vt = VanTreesBound(row.d, static_cast<double>(row.n),
                                            report.sup_trace, report.half_width);
    report.van_trees_value = vt.value;
    report.condition_ok = vt.first_term_dominates;
  } else if (row.mechanism == Mechanism::kSubsampleKrr) {
    report.corollary = "cor3ii_low";
  }
  return report;
}

TrialOutcome RunTrial(const RowSpec& row, const ExperimentConfig& config,
                      CounterRng& rng) {
  const std::vector<double> theta = RowTheta(row, config);
  switch (row.mechanism) {
    case Mechanism::kFrequency:
    case Mechanism::kYeBarg:
    case Mechanism::kKrr:
      return MultinomialTrial(row, theta, rng);
    case Mechanism::kSparseBernoulli: {
      const BinaryMatrix x = DrawBernoulli(theta, row.n, rng);
      const SparseBernoulliPipeline pipeline(row.d, row.eps, config.sparse);
      return {SquaredError(pipeline.Run(x, rng), theta), false};
    }
    case Mechanism::kTwoPhase: {
      const BinaryMatrix x = DrawBernoulli(theta, row.n, rng);
      const TwoPhaseResult result = TwoPhaseEstimate(x, row.eps, config.two_phase, rng);
      bool failure = false;
      for (std::size_t j = 0; j < theta.size(); ++j) {
        failure = failure || std::abs(result.coarse[j] - theta[j]) >= 1.0 / row.d;
      }
      return {SquaredError(result.theta_hat, theta), failure};
    }
    case Mechanism::kSubsampleKrr:
      return SubsampleTrial(row, config, theta, rng);
    case Mechanism::kGaussianRr: {
      std::vector<double> samples(row.n * theta.size());
      for (std::size_t k = 0; k < row.n; ++k) {
        for (std::size_t j = 0; j < theta.size(); ++j) {
          samples[k * theta.size() + j] = theta[j] + config.sigma0 * rng.Normal();
        }
      }
      const std::vector<double> estimate =
          GaussianMeanEstimate(samples, row.d, row.eps, ResolveClip(config), rng);
      return {SquaredError(estimate, theta), false};
    }
  }
  throw ConfigError("unknown mechanism");
}

RiskEstimate EmpiricalRisk(const RowSpec& row, const ExperimentConfig& config,
                           std::uint64_t row_index) {
  const auto trials = static_cast<std::size_t>(config.trials);
  std::vector<TrialOutcome> outcomes(trials);
  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1U, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        CounterRng rng = CounterRng::ForTrial(config.seed, row_index, t);
        outcomes[t] = RunTrial(row, config, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = trials;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }
  if (error) std::rethrow_exception(error);

  RiskEstimate risk;
  double failures = 0.0;
  for (const TrialOutcome& outcome : outcomes) {
    risk.mean += outcome.loss;
    failures += outcome.failure ? 1.0 : 0.0;
  }
  risk.mean /= static_cast<double>(trials);
  risk.failure_rate = failures / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (const TrialOutcome& outcome : outcomes) {
      ss += (outcome.loss - risk.mean) * (outcome.loss - risk.mean);
    }
    risk.stderr_ = std::sqrt(ss / static_cast<double>(trials - 1) /
                             static_cast<double>(trials));
  }
  return risk;
}

std::string RiskReport::ToCsv() const {
  std::ostringstream out;
  out << "# ldpfisher risk report, schema_version=" << kSchemaVersion << '\n';
  out << "schema_version,mechanism,d,s,eps,n,trials,risk_mean,risk_stderr,"
         "vt_bound,rate_formula,ratio,seed\n";
  for (const RowResult& row : rows) {
    out << kSchemaVersion << ',' << MechanismName(row.spec.mechanism) << ','
        << row.spec.d << ',' << FormatDouble(row.spec.s) << ','
        << FormatDouble(row.spec.eps) << ',' << row.spec.n << ',' << row.trials
        << ',' << FormatDouble(row.risk_mean) << ','
        << FormatDouble(row.risk_stderr) << ',' << FormatDouble(row.vt_bound)
        << ',' << FormatDouble(row.rate_formula) << ','
        << FormatDouble(row.ratio) << ',' << seed << '\n';
  }
  return out.str();
}

Json RiskReport::ToJson() const {
  Json rows_json = Json::array();
  for (const RowResult& row : rows) {
    rows_json.push_back({{"mechanism", MechanismName(row.spec.mechanism)},
                         {"d", row.spec.d},
                         {"s", row.spec.s},
                         {"eps", row.spec.eps},
                         {"n", row.spec.n},
                         {"trials", row.trials},
                         {"risk_mean", row.risk_mean},
                         {"risk_stderr", row.risk_stderr},
                         {"vt_bound", row.vt_bound},
                         {"rate_formula", row.rate_formula},
                         {"ratio", row.ratio},
                         {"calibrated_bound", row.calibrated_bound},
                         {"failure_rate", row.failure_rate},
                         {"wall_seconds", row.wall_seconds},
                         {"corollary", row.corollary}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"seed", seed},
              {"note", "empirical risks of specific (mechanism, estimator) pairs "
                       "at fixed theta: upper-bound demonstrations, not minimax values"},
              {"rows", rows_json}};
}

std::string RiskReport::SummaryTable() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-17s %4s %5s %7s %9s %12s %11s %12s %12s %8s\n",
                "mechanism", "d", "s", "eps", "n", "risk", "stderr", "vt_bound",
                "rate", "ratio");
  out << line;
  for (const RowResult& row : rows) {
    std::snprintf(line, sizeof(line),
                  "%-17s %4d %5.2f %7.3f %9zu %12.5g %11.3g %12.5g %12.5g %8.3f\n",
                  MechanismName(row.spec.mechanism).c_str(), row.spec.d, row.spec.s,
                  row.spec.eps, row.spec.n, row.risk_mean, row.risk_stderr,
                  row.vt_bound, row.rate_formula, row.ratio);
    out << line;
  }
  return out.str();
}

RiskReport RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  RiskReport report;
  report.seed = config.seed;
  const std::vector<RowSpec> rows = config.Rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const RowSpec& spec = rows[r];
    const auto start = std::chrono::steady_clock::now();
    RowResult result;
    result.spec = spec;
    result.trials = config.trials;
    try {
      const RiskEstimate risk = EmpiricalRisk(spec, config, r);
      const LowerBoundReport bound = RowLowerBound(spec, config);
      result.risk_mean = risk.mean;
      result.risk_stderr = risk.stderr_;
      result.failure_rate = risk.failure_rate;
      result.vt_bound = bound.van_trees_value;
      result.corollary = bound.corollary;
      result.rate_formula = RateFormula(spec, config);
      result.ratio = result.risk_mean / result.rate_formula;
    } catch (const std::exception& e) {
      std::ostringstream context;
      context << "row " << r << " (" << MechanismName(spec.mechanism) << ", d="
              << spec.d << ", s=" << spec.s << ", eps=" << spec.eps
              << ", n=" << spec.n << "): " << e.what();
      throw std::runtime_error(context.str());
    }
    const std::string name = MechanismName(spec.mechanism);
    const auto& table = config.calibration.empty() ? DefaultCalibration() : config.calibration;
    if (const auto it = table.find(name); it != table.end()) {
      result.calibrated_bound = it->second * result.rate_formula;
    }
    result.wall_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    report.rows.push_back(result);
  }
  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    const std::filesystem::path dir(config.output_dir);
    std::ofstream csv(dir / "risk.csv", std::ios::binary);
    std::ofstream json(dir / "risk.json", std::ios::binary);
    if (!csv || !json) throw std::runtime_error("cannot write to " + config.output_dir);
    csv << report.ToCsv();
    json << report.ToJson().dump(2) << '\n';
    if (!csv || !json) throw std::runtime_error("write failed in " + config.output_dir);
  }
  return report;
}

std::vector<ReportRecord> ParseRecordsCsv(const std::string& text) {
  std::vector<ReportRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
    ReportRecord record;
    char c1 = 0;
    char c2 = 0;
    std::istringstream fields(line);
    if (!(fields >> record.node >> c1 >> record.phase >> c2 >> record.symbol) ||
        c1 != ',' || c2 != ',') {
      throw ConfigError("bad record on line " + std::to_string(line_no));
    }
    records.push_back(record);
  }
  return records;
}

std::vector<double> EstimateFromRecords(const Json& config,
                                        const std::vector<ReportRecord>& records) {
  if (records.empty()) throw ArgumentDomainError("empty reports");
  const Mechanism mechanism = ParseMechanism(Require<std::string>(config, "mechanism"));
  const int d = Require<int>(config, "d");
  const double eps = Require<double>(config, "eps");
  switch (mechanism) {
    case Mechanism::kYeBarg: {
      const int w = Optional<int>(config, "w", ChooseW(d, eps));
      const YeBargChannel channel(d, w, eps);
      std::vector<double> counts(static_cast<std::size_t>(d), 0.0);
      for (const ReportRecord& record : records) {
        if (record.symbol >= channel.output_size()) throw ConfigError("symbol out of range");
        for (int i : UnrankSubset(record.symbol, d, w)) counts[static_cast<std::size_t>(i)] += 1.0;
      }
      return YeBargEstimateFromCounts(counts, static_cast<double>(records.size()), d, w, eps);
    }
    case Mechanism::kKrr: {
      std::vector<double> counts(static_cast<std::size_t>(d), 0.0);
      for (const ReportRecord& record : records) {
        if (record.symbol >= static_cast<std::uint64_t>(d)) throw ConfigError("symbol out of range");
        counts[record.symbol] += 1.0;
      }
      return KrrFrequencyEstimate(counts, static_cast<double>(records.size()), d, eps);
    }
    case Mechanism::kSparseBernoulli: {
      SparsePipelineConfig cfg;
      cfg.halving = Optional<bool>(config, "halving", cfg.halving);
      const SparseBernoulliPipeline pipeline(d, eps, cfg);
      auto tally = pipeline.NewTally();
      for (const ReportRecord& record : records) pipeline.AddRecord(tally, record);
      return pipeline.Estimate(tally);
    }
    case Mechanism::kSubsampleKrr: {
      const SubsampleKrrChannel channel =
          config.contains("k") ? SubsampleKrrChannel::WithK(d, Require<int>(config, "k"), eps)
                               : SubsampleKrrChannel(d, eps, Optional<double>(config, "slack", 10.0));
      std::vector<double> buckets(static_cast<std::size_t>(d) + 1, 0.0);
      std::vector<double> counts(static_cast<std::size_t>(d), 0.0);
      double m = 0.0;
      double reports = 0.0;
      for (const ReportRecord& record : records) {
        if (record.phase == 0) {
          if (record.symbol > static_cast<std::uint64_t>(d)) throw ConfigError("bucket out of range");
          buckets[record.symbol] += 1.0;
          m += 1.0;
        } else {
          if (record.symbol >= channel.output_size()) throw ConfigError("symbol out of range");
          for (int i : UnrankSparseSupport(record.symbol, d)) counts[static_cast<std::size_t>(i)] += 1.0;
          reports += 1.0;
        }
      }
      SubsampleAggregatorState state;
      state.a = channel.a();
      state.b = channel.b();
      state.m = static_cast<std::size_t>(m);
      if (m > 0.0) {
        state.mu_r = {Optional<std::string>(config, "mu_target", "kept") == "mean"
                          ? EstimateMeanRate(buckets, m, channel.k(), eps)
                          : EstimateKeptRate(buckets, m, channel.k(), eps)};
      }
      return SubsampleKrrEstimate(counts, reports, state);
    }
    default:
      throw UnsupportedError("no record decoder for " + MechanismName(mechanism));
  }
}

std::vector<CheckResult> RunVerification(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  auto record = [&](const std::string& name, bool passed, const std::string& detail) {
    checks.push_back({name, passed, detail});
  };

  // Subset-mechanism estimator: exact bias and risk under enumeration.
  {
    double worst_bias = 0.0;
    double worst_mse = 0.0;
    for (int d : {3, 4, 5}) {
      for (int w : {1, 2}) {
        for (double eps : {std::log(2.0), 1.0, 2.0}) {
          const FiniteChannel channel = MakeYeBarg(d, w, eps).Materialize();
          std::vector<double> p(static_cast<std::size_t>(d), 1.0 / d);
          std::vector<double> indicators(channel.output_size() * d, 0.0);
          for (std::size_t y = 0; y < channel.output_size(); ++y) {
            for (int i : UnrankSubset(y, d, w)) indicators[y * d + i] = 1.0;
          }
          const double n = 1000.0;
          const auto moments = oracle::ExactAffineEstimatorMoments(
              channel, p, indicators, p, YeBargEstimatorSpec(d, w, eps), n);
          for (double b : moments.bias) worst_bias = std::max(worst_bias, std::abs(b));
          const double formula = YeBargRiskFormula(d, w, eps, n, 1.0 / d);
          worst_mse = std::max(worst_mse, std::abs(moments.mse - formula) / formula);
        }
      }
    }
    record("subset_estimator_exact", worst_bias <= 1e-12 && worst_mse <= 1e-12,
           "max |bias| " + FormatDouble(worst_bias) + ", max rel mse gap " +
               FormatDouble(worst_mse));
  }

  // Fisher trace against finite differences, and the variance bounds.
  {
    CounterRng rng(seed);
    double worst_rel = 0.0;
    std::size_t violations = 0;
    const StatModel model = StatModel::BernoulliProduct(2);
    const ParamDomain domain = ParamDomain::Cube(2, 0.2, 0.8);
    for (int trial = 0; trial < 40; ++trial) {
      const double eps = std::array<double, 4>{0.1, 0.5, 1.0, 2.0}[trial % 4];
      const FiniteChannel channel = RandomLdpChannel(4, 3 + trial % 5, eps, rng);
      const ParamPoint theta{0.2 + 0.6 * rng.Uniform(), 0.2 + 0.6 * rng.Uniform()};
      const double exact = TraceFisherExact(model, channel, theta);
      const double fd = oracle::FiniteDiffTrace(model, channel, theta);
      if (exact > 1e-12) worst_rel = std::max(worst_rel, std::abs(exact - fd) / exact);
      const double bound = VarianceFisherBound(ScoreVarianceSup(model, domain), eps);
      if (exact > bound + 1e-9) ++violations;
    }
    record("fisher_trace_vs_finite_difference", worst_rel <= 1e-6,
           "max relative gap " + FormatDouble(worst_rel));
    record("variance_bound_fuzz", violations == 0,
           std::to_string(violations) + " violations in 40 channels");
  }

  // Chain rule and blackboard bound on adaptive toys.
  {
    const StatModel model = StatModel::BernoulliProduct(1);
    const ParamPoint theta{0.3};
    double gap = 0.0;
    for (int nodes : {2, 3}) {
      const ChainRuleSides sides =
          VerifyChainRule(BiasFlipProtocol(nodes, 2, 1.0), model, theta);
      gap = std::max(gap, std::abs(sides.lhs - sides.rhs));
    }
    record("chain_rule", gap <= 1e-10, "max |lhs - rhs| " + FormatDouble(gap));
    const double eps = 1.0;
    const TranscriptTrace bb =
        TranscriptTraceExact(BudgetSplitProtocol(2, 2, 2, eps), model, theta);
    const double bound =
        2.0 * model.ScoreVarianceAt(theta) * std::expm1(eps) * std::expm1(eps);
    record("blackboard_bound", bb.trace <= bound + 1e-9 && bb.max_log_ratio <= eps + 1e-12,
           "trace " + FormatDouble(bb.trace) + " vs " + FormatDouble(bound));
  }
  return checks;
}

}  // namespace ldpfisher
