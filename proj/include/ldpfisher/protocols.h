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

#ifndef LDPFISHER_PROTOCOLS_H_
#define LDPFISHER_PROTOCOLS_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ldpfisher/channels.h"
#include "ldpfisher/models.h"
#include "ldpfisher/random.h"

namespace ldpfisher {

// Channel used by `node` in `round` given every earlier public message, in
// slot order (round-major, then node). Must be a pure function of its
// arguments. A one-column channel is an abstention: it releases a fixed
// null symbol and spends no budget.
using NodeStrategy = std::function<FiniteChannel(
    int node, int round, std::span<const std::size_t> history)>;

struct Protocol {
  int nodes = 0;
  int rounds = 1;
  double eps = 0.0;  // per-node budget across all rounds
  NodeStrategy strategy;
  std::string label;

  void Validate() const;
  std::size_t slots() const {
    return static_cast<std::size_t>(nodes) * static_cast<std::size_t>(rounds);
  }
};

// Messages in slot order; message (node i, round t) sits at t * nodes + i.
struct Transcript {
  int nodes = 0;
  int rounds = 0;
  std::vector<std::size_t> messages;

  std::size_t Message(int node, int round) const {
    return messages[static_cast<std::size_t>(round) * nodes + node];
  }
  // Board B_t: the messages of round t.
  std::vector<std::size_t> Board(int round) const;
};

// One round. Each node's channel is checked against eps when drawn.
Transcript RunSequential(const Protocol& protocol, const StatModel& model,
                         const ParamPoint& theta, CounterRng& rng);

// Several rounds; node i keeps its sample X_i across rounds. The realized
// per-node likelihood-ratio product over rounds is checked against e^eps
// and BudgetExceededError names the node and history on failure.
Transcript RunBlackboard(const Protocol& protocol, const StatModel& model,
                         const ParamPoint& theta, CounterRng& rng);

struct TranscriptTrace {
  double trace = 0.0;         // E_Z ||sum_i u_i(Z)||^2
  double per_node_sum = 0.0;  // E_Z sum_i ||u_i(Z)||^2 (cross terms dropped)
  double max_log_ratio = 0.0;  // max over nodes and transcripts
  std::size_t transcripts = 0;
};

// Largest number of complete transcripts enumerated before CapExceededError.
inline constexpr std::size_t kTranscriptCap = 10000;

// Exact Tr I_Z(theta) by enumerating transcripts, with
// u_i(z) = E[S(X_i) p_{i,z}(X_i)] / E[p_{i,z}(X_i)].
TranscriptTrace TranscriptTraceExact(const Protocol& protocol,
                                     const StatModel& model,
                                     const ParamPoint& theta);

struct ChainRuleSides {
  double lhs = 0.0;  // Tr I_{Y_1..Y_n}
  double rhs = 0.0;  // sum_i E_{Y_<i} Tr I_{Y_i | Y_<i}
};

// Single-round protocols only.
ChainRuleSides VerifyChainRule(const Protocol& protocol,
                               const StatModel& model,
                               const ParamPoint& theta);

// Probability of every complete transcript (slot-ordered symbol tuples),
// for frequency comparisons.
std::vector<std::pair<std::vector<std::size_t>, double>> TranscriptLaw(
    const Protocol& protocol, const StatModel& model, const ParamPoint& theta);

// Named templates over an input alphabet of size k.
// constant: k-RR at eps for every node.
Protocol ConstantProtocol(int nodes, int k, double eps);
// bias_flip: node 0 uses k-RR; later nodes reverse the output labels when
// the previous message is odd.
Protocol BiasFlipProtocol(int nodes, int k, double eps);
// budget_split: k-RR at split[t] * eps in round t (equal split when empty),
// reversing labels when the previous board's last message is odd.
Protocol BudgetSplitProtocol(int nodes, int rounds, int k, double eps,
                             std::vector<double> split = {});
// Template by name: "constant", "bias_flip" or "budget_split".
Protocol MakeProtocol(const std::string& name, int nodes, int rounds, int k,
                      double eps);

}  // namespace ldpfisher

#endif  // LDPFISHER_PROTOCOLS_H_
