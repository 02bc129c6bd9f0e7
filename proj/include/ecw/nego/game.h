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

// The alternating-offer negotiation game: two agents split a pool of three
// item types, optionally exchanging proposals, cheap-talk utterances or
// masked proposals, under explicit or proposal-agreement termination.

#ifndef ECW_NEGO_GAME_H_
#define ECW_NEGO_GAME_H_

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ecw/nnet/net.h"
#include "ecw/nnet/rng.h"

namespace ecw::nego {

inline constexpr int kNumItemTypes = 3;
inline constexpr int kMaxItemCount = 5;
inline constexpr int kMaxUtility = 10;
inline constexpr int kAgentA = 0;
inline constexpr int kAgentB = 1;

using Items = std::array<int, kNumItemTypes>;

enum class Channel { kNone, kProposal, kLinguistic, kBoth, kMaskedLinguistic };
enum class Termination { kExplicit, kProposalAgreement };

std::string_view ToString(Channel channel);
std::string_view ToString(Termination termination);
Channel ParseChannel(std::string_view name);
Termination ParseTermination(std::string_view name);

struct NegotiationConfig {
  Channel channel = Channel::kNone;
  Termination termination = Termination::kExplicit;
  int vocab_size = 11;
  int utterance_length = 6;
  int hidden_size = 100;
  double term_entropy = 0.05;
  double proposal_entropy = 0.05;
  // Also used for the mask heads of the masked-linguistic channel.
  double utterance_entropy = 0.001;
  double rounds_mean = 7.0;
  int min_rounds = 4;
  int max_rounds = 10;
  // Masked-linguistic messages reveal m * u (utilities) instead of m * p.
  bool mask_reveals_utility = false;
  // Value the non-proposer's share with the proposer's utilities.
  bool literal_reward = false;
  // Train on the unnormalized share value instead of the normalized reward.
  bool raw_return = false;

  int batch_size = 128;
  int batches_per_epoch = 500;
  int epochs = 20;
  double learning_rate = 1e-3;
  nnet::AdamConfig adam;

  void Validate() const;

  bool ProposalVisible() const {
    return channel == Channel::kProposal || channel == Channel::kBoth;
  }
  bool Linguistic() const {
    return channel == Channel::kLinguistic || channel == Channel::kBoth;
  }
  bool Masked() const { return channel == Channel::kMaskedLinguistic; }
};

nlohmann::json ToJson(const NegotiationConfig& config);
NegotiationConfig NegotiationConfigFromJson(const nlohmann::json& doc,
                                            NegotiationConfig base = {});

struct AgentTurn {
  // -1 accepts whichever agent is active.
  int agent = -1;
  bool terminate = false;
  Items proposal{};
  std::vector<int> utterance;
  Items mask{};
};

enum class Outcome { kOngoing, kAccepted, kTimeout };

struct NegotiationState {
  Items pool{};
  std::array<Items, 2> utilities{};
  int turn = 0;  // turns taken so far
  int round_limit = 0;
  std::array<std::optional<Items>, 2> last_proposal;
  std::array<std::optional<std::vector<int>>, 2> last_utterance;
  std::array<std::optional<Items>, 2> last_mask;
  Outcome outcome = Outcome::kOngoing;
  std::optional<Items> accepted;
  int proposer = -1;  // owner of the accepted proposal

  bool terminal() const { return outcome != Outcome::kOngoing; }
  int ActiveAgent() const { return turn % 2; }
};

int Dot(const Items& a, const Items& b);
bool IsValidProposal(const Items& proposal, const Items& pool);

// Poisson(rounds_mean) clamped to [min_rounds, max_rounds].
int DrawRoundLimit(const NegotiationConfig& config, nnet::Rng& rng);

// Uniform pool and utilities, redrawn until both agents value the pool.
NegotiationState InitGame(const NegotiationConfig& config, nnet::Rng& rng);

// Applies the active agent's turn. Throws UsageError on a terminal state or
// wrong agent and ConfigError on malformed actions.
NegotiationState Step(NegotiationState state, const AgentTurn& turn,
                      const NegotiationConfig& config);

// Items each agent ends up with; only defined for a valid accepted split.
std::array<Items, 2> Allocation(const NegotiationState& state);

// Unnormalized rewards: each share valued by the agent's utilities.
std::array<double, 2> RawRewards(const NegotiationState& state,
                                 const NegotiationConfig& config);
// Normalized rewards (R_A, R_B), each in [0, 1]. Zero for timeouts and
// invalid accepted proposals.
std::array<double, 2> Rewards(const NegotiationState& state,
                              const NegotiationConfig& config);

int ObservationSize(const NegotiationConfig& config);
// Fixed-length encoding of what `agent` sees: own utilities, the pool, its
// own previous proposal, and the opponent's channel-visible outputs. Counts
// are scaled to [0, 1]; absent fields are zero with a zero presence flag.
Eigen::VectorXd Observe(const NegotiationState& state,
                        const NegotiationConfig& config, int agent);
void ObserveInto(const NegotiationState& state,
                 const NegotiationConfig& config, int agent,
                 Eigen::Ref<Eigen::VectorXd> out);

}  // namespace ecw::nego

#endif  // ECW_NEGO_GAME_H_
