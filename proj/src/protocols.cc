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

#include "ldpfisher/protocols.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "ldpfisher/errors.h"
#include "ldpfisher/fisher.h"

namespace ldpfisher {
namespace {

constexpr double kRatioTol = 1e-12;

std::string HistoryString(std::span<const std::size_t> history) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i > 0) out << ',';
    out << history[i];
  }
  out << ']';
  return out.str();
}

// log(max / min) of a node's accumulated factor over the input alphabet.
double LogRatio(std::span<const double> factor) {
  const auto [lo, hi] = std::minmax_element(factor.begin(), factor.end());
  if (*hi <= 0.0) return 0.0;
  if (*lo <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(*hi / *lo);
}

FiniteChannel Reversed(const FiniteChannel& channel) {
  const std::size_t nx = channel.input_size();
  const std::size_t ny = channel.output_size();
  std::vector<double> kernel(nx * ny);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      kernel[x * ny + y] = channel(x, ny - 1 - y);
    }
  }
  return FiniteChannel(nx, ny, std::move(kernel), channel.eps_nominal(),
                       channel.label() + "/reversed");
}

FiniteChannel FetchChannel(const Protocol& protocol, int node, int round,
                           std::span<const std::size_t> history,
                           std::size_t input_size) {
  FiniteChannel channel = protocol.strategy(node, round, history);
  if (channel.input_size() != input_size) {
    throw DimensionMismatchError("strategy channel input size differs from the model");
  }
  return channel;
}

class Enumerator {
 public:
  Enumerator(const Protocol& protocol, const StatModel& model,
             const ParamPoint& theta, bool chain_rule)
      : protocol_(protocol),
        model_(model),
        theta_(theta),
        chain_rule_(chain_rule),
        pmf_(model.Pmf(theta)),
        k_(pmf_.size()),
        dim_(static_cast<std::size_t>(model.dim())),
        factor_(static_cast<std::size_t>(protocol.nodes),
                std::vector<double>(pmf_.size(), 1.0)),
        mass_(static_cast<std::size_t>(protocol.nodes), 1.0) {
    for (std::size_t x = 0; x < k_; ++x) scores_.push_back(model.ScoreAt(theta, x));
  }

  void Run(std::vector<std::pair<std::vector<std::size_t>, double>>* law) {
    law_ = law;
    Visit(0, 1.0);
  }

  const TranscriptTrace& trace() const { return trace_; }
  double chain_rhs() const { return chain_rhs_; }

 private:
  void Visit(std::size_t slot, double prefix) {
    if (slot == protocol_.slots()) {
      Leaf(prefix);
      return;
    }
    const int node = static_cast<int>(slot % static_cast<std::size_t>(protocol_.nodes));
    const int round = static_cast<int>(slot / static_cast<std::size_t>(protocol_.nodes));
    const FiniteChannel channel = FetchChannel(protocol_, node, round, history_, k_);
    if (chain_rule_) {
      chain_rhs_ += prefix * TraceFisherExact(model_, channel, theta_);
    }
    auto& factor = factor_[static_cast<std::size_t>(node)];
    const std::vector<double> saved = factor;
    const double saved_mass = mass_[static_cast<std::size_t>(node)];
    for (std::size_t y = 0; y < channel.output_size(); ++y) {
      double mass = 0.0;
      for (std::size_t x = 0; x < k_; ++x) {
        factor[x] = saved[x] * channel(x, y);
        mass += pmf_[x] * factor[x];
      }
      if (mass <= 0.0) continue;
      const double log_ratio = LogRatio(factor);
      if (log_ratio > protocol_.eps + kRatioTol) {
        history_.push_back(y);
        throw BudgetExceededError("node " + std::to_string(node) +
                                  " exceeds its budget after history " +
                                  HistoryString(history_));
      }
      trace_.max_log_ratio = std::max(trace_.max_log_ratio, log_ratio);
      mass_[static_cast<std::size_t>(node)] = mass;
      history_.push_back(y);
      Visit(slot + 1, prefix / saved_mass * mass);
      history_.pop_back();
    }
    factor = saved;
    mass_[static_cast<std::size_t>(node)] = saved_mass;
  }

  void Leaf(double prob) {
    if (++trace_.transcripts > kTranscriptCap) {
      throw CapExceededError("transcript enumeration exceeds " +
                             std::to_string(kTranscriptCap) + " transcripts");
    }
    if (law_ != nullptr) law_->emplace_back(history_, prob);
    std::vector<double> total(dim_, 0.0);
    double per_node = 0.0;
    for (std::size_t i = 0; i < factor_.size(); ++i) {
      std::vector<double> u(dim_, 0.0);
      for (std::size_t x = 0; x < k_; ++x) {
        const double w = pmf_[x] * factor_[i][x] / mass_[i];
        for (std::size_t j = 0; j < dim_; ++j) u[j] += w * scores_[x][j];
      }
      for (std::size_t j = 0; j < dim_; ++j) {
        per_node += u[j] * u[j];
        total[j] += u[j];
      }
    }
    double norm = 0.0;
    for (double v : total) norm += v * v;
    trace_.trace += prob * norm;
    trace_.per_node_sum += prob * per_node;
  }

  const Protocol& protocol_;
  const StatModel& model_;
  const ParamPoint& theta_;
  bool chain_rule_;
  std::vector<double> pmf_;
  std::size_t k_;
  std::size_t dim_;
  std::vector<ScoreVector> scores_;
  std::vector<std::vector<double>> factor_;
  std::vector<double> mass_;
  std::vector<std::size_t> history_;
  TranscriptTrace trace_;
  double chain_rhs_ = 0.0;
  std::vector<std::pair<std::vector<std::size_t>, double>>* law_ = nullptr;
};

void CheckFiniteInstance(const Protocol& protocol, const StatModel& model,
                         const ParamPoint& theta) {
  protocol.Validate();
  if (!model.is_finite()) throw UnsupportedError("protocols need a finite model");
  model.CheckInterior(theta);
}

Transcript Simulate(const Protocol& protocol, const StatModel& model,
                    const ParamPoint& theta, CounterRng& rng,
                    bool per_channel_check) {
  protocol.Validate();
  if (!model.is_finite()) throw UnsupportedError("protocols need a finite model");
  model.CheckClosed(theta);
  const std::size_t k = model.SampleSpaceSize();
  Transcript transcript;
  transcript.nodes = protocol.nodes;
  transcript.rounds = protocol.rounds;
  std::vector<std::size_t> inputs;
  for (int i = 0; i < protocol.nodes; ++i) inputs.push_back(model.DrawIndex(theta, rng));
  std::vector<std::vector<double>> factor(static_cast<std::size_t>(protocol.nodes),
                                          std::vector<double>(k, 1.0));
  for (std::size_t slot = 0; slot < protocol.slots(); ++slot) {
    const int node = static_cast<int>(slot % static_cast<std::size_t>(protocol.nodes));
    const int round = static_cast<int>(slot / static_cast<std::size_t>(protocol.nodes));
    const FiniteChannel channel =
        FetchChannel(protocol, node, round, transcript.messages, k);
    if (per_channel_check && ValidateEps(channel) > protocol.eps + kRatioTol) {
      throw PrivacyViolationError("node " + std::to_string(node) +
                                  " channel exceeds eps after history " +
                                  HistoryString(transcript.messages));
    }
    const std::size_t y = channel.Sample(inputs[static_cast<std::size_t>(node)], rng);
    transcript.messages.push_back(y);
    auto& f = factor[static_cast<std::size_t>(node)];
    for (std::size_t x = 0; x < k; ++x) f[x] *= channel(x, y);
    if (LogRatio(f) > protocol.eps + kRatioTol) {
      throw BudgetExceededError("node " + std::to_string(node) +
                                " exceeds its budget after history " +
                                HistoryString(transcript.messages));
    }
  }
  return transcript;
}

}  // namespace

void Protocol::Validate() const {
  if (nodes < 0) throw ArgumentDomainError("node count must be >= 0");
  if (rounds < 1) throw ArgumentDomainError("round count must be >= 1");
  if (!(eps >= 0.0)) throw ArgumentDomainError("budget must be >= 0");
  if (nodes > 0 && !strategy) throw ArgumentDomainError("protocol has no strategy");
}

std::vector<std::size_t> Transcript::Board(int round) const {
  if (round < 0 || round >= rounds) throw ArgumentDomainError("round out of range");
  const auto begin = messages.begin() + static_cast<std::ptrdiff_t>(round) * nodes;
  return {begin, begin + nodes};
}

Transcript RunSequential(const Protocol& protocol, const StatModel& model,
                         const ParamPoint& theta, CounterRng& rng) {
  if (protocol.rounds != 1) {
    throw ArgumentDomainError("sequential protocols have exactly one round");
  }
  return Simulate(protocol, model, theta, rng, true);
}

Transcript RunBlackboard(const Protocol& protocol, const StatModel& model,
                         const ParamPoint& theta, CounterRng& rng) {
  return Simulate(protocol, model, theta, rng, false);
}

TranscriptTrace TranscriptTraceExact(const Protocol& protocol,
                                     const StatModel& model,
                                     const ParamPoint& theta) {
  CheckFiniteInstance(protocol, model, theta);
  Enumerator enumerator(protocol, model, theta, false);
  enumerator.Run(nullptr);
  return enumerator.trace();
}

ChainRuleSides VerifyChainRule(const Protocol& protocol,
                               const StatModel& model,
                               const ParamPoint& theta) {
  CheckFiniteInstance(protocol, model, theta);
  if (protocol.rounds != 1) {
    throw UnsupportedError("chain-rule check needs a single-round protocol");
  }
  Enumerator enumerator(protocol, model, theta, true);
  enumerator.Run(nullptr);
  return {enumerator.trace().trace, enumerator.chain_rhs()};
}

std::vector<std::pair<std::vector<std::size_t>, double>> TranscriptLaw(
    const Protocol& protocol, const StatModel& model, const ParamPoint& theta) {
  protocol.Validate();
  if (!model.is_finite()) throw UnsupportedError("protocols need a finite model");
  model.CheckClosed(theta);
  std::vector<std::pair<std::vector<std::size_t>, double>> law;
  Enumerator enumerator(protocol, model, theta, false);
  enumerator.Run(&law);
  return law;
}

Protocol ConstantProtocol(int nodes, int k, double eps) {
  const FiniteChannel channel = MakeKrr(k, eps).Materialize();
  Protocol protocol;
  protocol.nodes = nodes;
  protocol.eps = eps;
  protocol.label = "constant";
  protocol.strategy = [channel](int, int, std::span<const std::size_t>) {
    return channel;
  };
  return protocol;
}

Protocol BiasFlipProtocol(int nodes, int k, double eps) {
  const FiniteChannel plain = MakeKrr(k, eps).Materialize();
  const FiniteChannel flipped = Reversed(plain);
  Protocol protocol;
  protocol.nodes = nodes;
  protocol.eps = eps;
  protocol.label = "bias_flip";
  protocol.strategy = [plain, flipped](int, int,
                                       std::span<const std::size_t> history) {
    return !history.empty() && history.back() % 2 == 1 ? flipped : plain;
  };
  return protocol;
}

Protocol BudgetSplitProtocol(int nodes, int rounds, int k, double eps,
                             std::vector<double> split) {
  if (rounds < 1) throw ArgumentDomainError("round count must be >= 1");
  if (split.empty()) split.assign(static_cast<std::size_t>(rounds), 1.0 / rounds);
  if (static_cast<int>(split.size()) != rounds) {
    throw DimensionMismatchError("budget split needs one share per round");
  }
  double total = 0.0;
  for (double share : split) {
    if (!(share >= 0.0)) throw ArgumentDomainError("budget shares must be >= 0");
    total += share;
  }
  if (total > 1.0 + 1e-12) throw BudgetExceededError("budget shares exceed 1");
  std::vector<FiniteChannel> plain;
  std::vector<FiniteChannel> flipped;
  for (double share : split) {
    plain.push_back(MakeKrr(k, share * eps).Materialize());
    flipped.push_back(Reversed(plain.back()));
  }
  Protocol protocol;
  protocol.nodes = nodes;
  protocol.rounds = rounds;
  protocol.eps = eps;
  protocol.label = "budget_split";
  protocol.strategy = [plain, flipped, nodes](
                          int, int round, std::span<const std::size_t> history) {
    const auto t = static_cast<std::size_t>(round);
    if (round == 0) return plain[t];
    const std::size_t last = history[t * static_cast<std::size_t>(nodes) - 1];
    return last % 2 == 1 ? flipped[t] : plain[t];
  };
  return protocol;
}

Protocol MakeProtocol(const std::string& name, int nodes, int rounds, int k,
                      double eps) {
  if (name == "constant" || name == "bias_flip") {
    if (rounds != 1) throw ConfigError(name + " protocols have one round");
    return name == "constant" ? ConstantProtocol(nodes, k, eps)
                              : BiasFlipProtocol(nodes, k, eps);
  }
  if (name == "budget_split") return BudgetSplitProtocol(nodes, rounds, k, eps);
  throw ConfigError("unknown protocol template: " + name);
}

}  // namespace ldpfisher
