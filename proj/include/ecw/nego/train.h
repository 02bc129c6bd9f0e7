// Copyright 2026 The ECW Authors
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

// REINFORCE self-play for the negotiation game. Each batch plays
// `batch_size` games in lockstep (agent A acts on even turns, B on odd),
// then each agent is updated from its own per-game return with a
// leave-one-out batch baseline and backpropagation through its turns.

#ifndef ECW_NEGO_TRAIN_H_
#define ECW_NEGO_TRAIN_H_

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecw/nego/game.h"
#include "ecw/nego/policy.h"
#include "ecw/nnet/rng.h"

namespace ecw::nego {

using AgentPair = std::array<AgentPolicy, 2>;

// Agents A and B drawn from streams 0 and 1 of Rng(seed).
AgentPair MakeAgents(const NegotiationConfig& config, std::uint64_t seed);

// Gradient of -adv * log p(choice) - entropy_coeff * H(p) w.r.t. the logits
// of one categorical group.
Eigen::VectorXd CategoricalLogitGrad(const Eigen::VectorXd& logits, int choice,
                                     double advantage, double entropy_coeff);
// Same for a Bernoulli with logit z and outcome x.
double BernoulliLogitGrad(double logit, bool outcome, double advantage,
                          double entropy_coeff);
double Sigmoid(double z);

// One lockstep turn of the batch. Per-game flags mark which heads produced
// actions that reached the environment; only those carry gradient.
struct StepRecord {
  int agent = 0;
  PolicyOutput out;
  std::vector<char> alive, term_used, proposal_used, message_used;
  std::vector<char> terminate;
  Eigen::MatrixXi proposal;   // 3 x B
  Eigen::MatrixXi utterance;  // L x B (linguistic channels)
  Eigen::MatrixXi mask;       // 3 x B (masked channel)
};

struct SelfPlayRollout {
  std::vector<NegotiationState> games;
  std::vector<StepRecord> steps;
  Eigen::MatrixXd rewards;  // 2 x B, normalized
  Eigen::MatrixXd returns;  // 2 x B, what training maximizes
};

SelfPlayRollout Rollout(const AgentPair& agents,
                        const NegotiationConfig& config, nnet::Rng& rng);

struct NegoBatchStats {
  double reward_a = 0.0;
  double reward_b = 0.0;
  double agreement_rate = 0.0;
  std::array<std::optional<double>, 2> unmask;
};

NegoBatchStats BatchStats(const SelfPlayRollout& rollout,
                          const NegotiationConfig& config);

// Accumulates both agents' policy gradients for a finished rollout.
void AccumulateGradients(AgentPair& agents, const SelfPlayRollout& rollout,
                         const NegotiationConfig& config);

NegoBatchStats TrainBatch(AgentPair& agents, const NegotiationConfig& config,
                          nnet::Rng& rng);

struct NegoEpochRecord {
  int epoch = 0;
  double reward_a = 0.0;
  double reward_b = 0.0;
  std::optional<double> unmask_a, unmask_b;
};

struct NegoRunRecord {
  std::uint64_t seed = 0;
  std::vector<NegoEpochRecord> epochs;
  bool failed = false;
  std::string diagnostic;
};

// Means over the last ceil(10%) of epochs.
struct FinalWindow {
  double reward_a = 0.0;
  double reward_b = 0.0;
  std::optional<double> unmask_a, unmask_b;
  int window = 0;
};

std::optional<FinalWindow> Final(const NegoRunRecord& run);

NegoRunRecord RunSelfPlay(const NegotiationConfig& config, std::uint64_t seed,
                          AgentPair* final_agents = nullptr);

struct SelfPlayResult {
  NegotiationConfig config;
  std::vector<NegoRunRecord> runs;
  std::vector<AgentPair> agents;
};

SelfPlayResult TrainSelfPlay(const NegotiationConfig& config,
                             const std::vector<std::uint64_t>& seeds,
                             int threads = 1);

// Seed-mean curve over non-failed runs.
std::vector<NegoEpochRecord> MeanCurve(const std::vector<NegoRunRecord>& runs);

std::string NegoDirName(const NegotiationConfig& config);
inline constexpr const char* kNegoMetricsHeader =
    "epoch,reward_a,reward_b,unmask_a,unmask_b";
std::string NegoMetricsCsv(const std::vector<NegoEpochRecord>& epochs);
std::vector<NegoEpochRecord> ParseNegoMetricsCsv(const std::string& text);

// Writes config.json, metrics.csv (seed means), summary.json and
// seed_<k>/{metrics.csv,agent_a.json,agent_b.json} under dir. Refuses to
// overwrite a completed directory.
void WriteSelfPlayDir(const std::filesystem::path& dir,
                      const SelfPlayResult& result);

}  // namespace ecw::nego

#endif  // ECW_NEGO_TRAIN_H_
