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

#ifndef LDPFISHER_HARNESS_H_
#define LDPFISHER_HARNESS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldpfisher/estimators.h"
#include "ldpfisher/random.h"
#include "ldpfisher/serialization.h"

namespace ldpfisher {

inline constexpr int kSchemaVersion = 1;

enum class Mechanism {
  kFrequency,        // identity channel + empirical frequencies (multinomial)
  kYeBarg,           // subset mechanism over d+1 categories (multinomial)
  kKrr,              // k-RR over d+1 categories (multinomial)
  kSparseBernoulli,  // single-one reduction pipeline (Bernoulli, s <= 1)
  kTwoPhase,         // coarse binary RR, grouping, sparse pipeline
  kSubsampleKrr,     // subsample to k ones, k-RR over sparse supports
  kGaussianRr,       // clipped binary RR per coordinate (Gaussian)
};

std::string MechanismName(Mechanism mechanism);
Mechanism ParseMechanism(const std::string& name);
ModelKind MechanismModel(Mechanism mechanism);

// One sweep row.
struct RowSpec {
  Mechanism mechanism = Mechanism::kYeBarg;
  int d = 2;
  double s = 1.0;
  double eps = 1.0;
  std::size_t n = 1000;
};

struct ExperimentConfig {
  std::vector<Mechanism> mechanisms{Mechanism::kYeBarg};
  std::vector<int> d_grid{4};
  std::vector<double> s_grid{1.0};
  std::vector<double> eps_grid{1.0};
  std::vector<std::size_t> n_grid{10000};
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 selects the hardware concurrency
  std::string output_dir;
  // Gaussian rows.
  double sigma0 = 1.0;
  double half_width = 1.0;
  double clip = 0.0;  // 0 selects B + 4 sigma0
  // Subsample rows.
  double slack = 10.0;
  double mu_budget_fraction = 0.1;
  std::string mu_target = "kept";  // "kept", "mean" or "oracle"
  // Explicit theta used for every row instead of the corollary point.
  std::optional<std::vector<double>> theta;
  SparsePipelineConfig sparse;
  TwoPhaseConfig two_phase;
  // Calibration constant C per mechanism: rows report C * rate_formula.
  std::map<std::string, double> calibration;

  static ExperimentConfig FromJson(const Json& json);
  Json ToJson() const;
  // trials >= 1, eps > 0, n >= 2, and per-mechanism shape checks.
  void Validate() const;
  // Rows in submission order: mechanism, d, s, eps, n (n fastest).
  std::vector<RowSpec> Rows() const;
};

// Frozen calibration constants: 1.25 times the largest ratio measured by
// the configs in tools/calibration (seed 1001, 200 trials), rounded up to
// two significant digits. The sparse and two-phase values were measured
// without the halving map.
const std::map<std::string, double>& DefaultCalibration();

// Parameter at which a row's risk is measured. Multinomial rows return all
// d+1 category probabilities.
std::vector<double> RowTheta(const RowSpec& row, const ExperimentConfig& config);

// Rate formula of the matching corollary.
double RateFormula(const RowSpec& row, const ExperimentConfig& config);

// van Trees lower bound over the corollary's domain.
LowerBoundReport RowLowerBound(const RowSpec& row,
                               const ExperimentConfig& config);

struct TrialOutcome {
  double loss = 0.0;
  bool failure = false;  // phase-1 failure event for two-phase rows
};

// One trial: draws n samples, privatizes, estimates, returns the squared
// l2 loss.
TrialOutcome RunTrial(const RowSpec& row, const ExperimentConfig& config,
                      CounterRng& rng);

struct RiskEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double failure_rate = 0.0;
};

// Mean and standard error over config.trials trials; trial t of row r uses
// CounterRng::ForTrial(seed, r, t) and results are reduced in trial order.
RiskEstimate EmpiricalRisk(const RowSpec& row, const ExperimentConfig& config,
                           std::uint64_t row_index);

struct RowResult {
  RowSpec spec;
  int trials = 0;
  double risk_mean = 0.0;
  double risk_stderr = 0.0;
  double vt_bound = 0.0;
  double rate_formula = 0.0;
  double ratio = 0.0;
  double calibrated_bound = 0.0;  // C * rate_formula, 0 without C
  double failure_rate = 0.0;
  double wall_seconds = 0.0;
  std::string corollary;
};

struct RiskReport {
  std::uint64_t seed = 0;
  std::vector<RowResult> rows;

  // Schema header line, column header, one row per result. Contains no
  // timing data, so it is reproducible from (config, seed).
  std::string ToCsv() const;
  Json ToJson() const;
  std::string SummaryTable() const;
};

// Runs every row; writes risk.csv and risk.json when output_dir is set.
RiskReport RunExperiment(const ExperimentConfig& config);

// Decodes (node, phase, symbol) records for one mechanism. Config fields:
// "mechanism", "d", "eps" and mechanism-specific extras ("w", "k",
// "slack", "split").
std::vector<double> EstimateFromRecords(const Json& config,
                                        const std::vector<ReportRecord>& records);
std::vector<ReportRecord> ParseRecordsCsv(const std::string& text);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Oracle and property checks on small instances (the `verify` command).
std::vector<CheckResult> RunVerification(std::uint64_t seed);

}  // namespace ldpfisher

#endif  // LDPFISHER_HARNESS_H_
