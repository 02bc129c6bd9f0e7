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

#include "ecw/nego/game.h"

#include <algorithm>

#include "ecw/errors.h"

namespace ecw::nego {

using nlohmann::json;

std::string_view ToString(Channel channel) {
  switch (channel) {
    case Channel::kNone:
      return "none";
    case Channel::kProposal:
      return "proposal";
    case Channel::kLinguistic:
      return "linguistic";
    case Channel::kBoth:
      return "both";
    case Channel::kMaskedLinguistic:
      return "masked_linguistic";
  }
  return "none";
}

std::string_view ToString(Termination termination) {
  return termination == Termination::kExplicit ? "explicit"
                                               : "proposal_agreement";
}

Channel ParseChannel(std::string_view name) {
  for (Channel c : {Channel::kNone, Channel::kProposal, Channel::kLinguistic,
                    Channel::kBoth, Channel::kMaskedLinguistic}) {
    if (ToString(c) == name) return c;
  }
  throw ConfigError("unknown channel '" + std::string(name) + "'");
}

Termination ParseTermination(std::string_view name) {
  if (name == "explicit") return Termination::kExplicit;
  if (name == "proposal_agreement") return Termination::kProposalAgreement;
  throw ConfigError("unknown termination '" + std::string(name) + "'");
}

void NegotiationConfig::Validate() const {
  if (vocab_size < 1 || utterance_length < 1 || hidden_size < 1) {
    throw ConfigError("vocab, utterance length and hidden size must be >= 1");
  }
  if (term_entropy < 0 || proposal_entropy < 0 || utterance_entropy < 0) {
    throw ConfigError("entropy coefficients must be >= 0");
  }
  if (!(rounds_mean > 0.0) || min_rounds < 1 || max_rounds < min_rounds) {
    throw ConfigError("round limits must satisfy 1 <= min <= max, mean > 0");
  }
  if (batch_size < 1 || batches_per_epoch < 1 || epochs < 0) {
    throw ConfigError("batch size and batches per epoch must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
}

json ToJson(const NegotiationConfig& c) {
  return {{"channel", ToString(c.channel)},
          {"termination", ToString(c.termination)},
          {"vocab_size", c.vocab_size},
          {"utterance_length", c.utterance_length},
          {"hidden_size", c.hidden_size},
          {"term_entropy", c.term_entropy},
          {"proposal_entropy", c.proposal_entropy},
          {"utterance_entropy", c.utterance_entropy},
          {"rounds_mean", c.rounds_mean},
          {"min_rounds", c.min_rounds},
          {"max_rounds", c.max_rounds},
          {"mask_reveals_utility", c.mask_reveals_utility},
          {"literal_reward", c.literal_reward},
          {"raw_return", c.raw_return},
          {"batch_size", c.batch_size},
          {"batches_per_epoch", c.batches_per_epoch},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"adam",
           {{"beta1", c.adam.beta1},
            {"beta2", c.adam.beta2},
            {"epsilon", c.adam.epsilon}}}};
}

NegotiationConfig NegotiationConfigFromJson(const json& doc,
                                            NegotiationConfig c) {
  if (!doc.is_object()) {
    throw ConfigError("negotiation config must be a JSON object");
  }
  try {
    if (doc.contains("channel")) {
      c.channel = ParseChannel(doc["channel"].get<std::string>());
    }
    if (doc.contains("termination")) {
      c.termination = ParseTermination(doc["termination"].get<std::string>());
    }
    c.vocab_size = doc.value("vocab_size", c.vocab_size);
    c.utterance_length = doc.value("utterance_length", c.utterance_length);
    c.hidden_size = doc.value("hidden_size", c.hidden_size);
    c.term_entropy = doc.value("term_entropy", c.term_entropy);
    c.proposal_entropy = doc.value("proposal_entropy", c.proposal_entropy);
    c.utterance_entropy = doc.value("utterance_entropy", c.utterance_entropy);
    c.rounds_mean = doc.value("rounds_mean", c.rounds_mean);
    c.min_rounds = doc.value("min_rounds", c.min_rounds);
    c.max_rounds = doc.value("max_rounds", c.max_rounds);
    c.mask_reveals_utility =
        doc.value("mask_reveals_utility", c.mask_reveals_utility);
    c.literal_reward = doc.value("literal_reward", c.literal_reward);
    c.raw_return = doc.value("raw_return", c.raw_return);
    c.batch_size = doc.value("batch_size", c.batch_size);
    c.batches_per_epoch = doc.value("batches_per_epoch", c.batches_per_epoch);
    c.epochs = doc.value("epochs", c.epochs);
    c.learning_rate = doc.value("learning_rate", c.learning_rate);
    if (doc.contains("adam")) {
      c.adam.beta1 = doc["adam"].value("beta1", c.adam.beta1);
      c.adam.beta2 = doc["adam"].value("beta2", c.adam.beta2);
      c.adam.epsilon = doc["adam"].value("epsilon", c.adam.epsilon);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad negotiation config: ") + e.what());
  }
  return c;
}

int Dot(const Items& a, const Items& b) {
  int s = 0;
  for (int k = 0; k < kNumItemTypes; ++k) s += a[k] * b[k];
  return s;
}

bool IsValidProposal(const Items& proposal, const Items& pool) {
  for (int k = 0; k < kNumItemTypes; ++k) {
    if (proposal[k] < 0 || proposal[k] > pool[k]) return false;
  }
  return true;
}

int DrawRoundLimit(const NegotiationConfig& config, nnet::Rng& rng) {
  return std::clamp(rng.Poisson(config.rounds_mean), config.min_rounds,
                    config.max_rounds);
}

NegotiationState InitGame(const NegotiationConfig& config, nnet::Rng& rng) {
  NegotiationState s;
  do {
    for (int k = 0; k < kNumItemTypes; ++k) {
      s.pool[k] = rng.UniformInt(0, kMaxItemCount);
    }
    for (Items& u : s.utilities) {
      for (int k = 0; k < kNumItemTypes; ++k) u[k] = rng.UniformInt(0, kMaxUtility);
    }
  } while (Dot(s.pool, s.utilities[kAgentA]) == 0 ||
           Dot(s.pool, s.utilities[kAgentB]) == 0);
  s.round_limit = DrawRoundLimit(config, rng);
  return s;
}

namespace {

void CheckItems(const Items& items, int hi, const char* what) {
  for (int v : items) {
    if (v < 0 || v > hi) {
      throw ConfigError(std::string(what) + " component outside [0, " +
                        std::to_string(hi) + "]");
    }
  }
}

}  // namespace

NegotiationState Step(NegotiationState state, const AgentTurn& turn,
                      const NegotiationConfig& config) {
  if (state.terminal()) throw UsageError("Step called on a terminal game");
  const int me = state.ActiveAgent();
  const int other = 1 - me;
  if (turn.agent != -1 && turn.agent != me) {
    throw UsageError("agent " + std::to_string(turn.agent) +
                     " acted out of turn");
  }
  CheckItems(turn.proposal, kMaxItemCount, "proposal");

  if (config.termination == Termination::kExplicit) {
    // A terminate with nothing on the table counts as a refusal.
    if (turn.terminate && state.last_proposal[other]) {
      state.outcome = Outcome::kAccepted;
      state.accepted = state.last_proposal[other];
      state.proposer = other;
      ++state.turn;
      return state;
    }
  } else if (state.last_proposal[other] &&
             *state.last_proposal[other] == turn.proposal) {
    state.outcome = Outcome::kAccepted;
    state.accepted = turn.proposal;
    state.proposer = me;
    state.last_proposal[me] = turn.proposal;
    ++state.turn;
    return state;
  }

  state.last_proposal[me] = turn.proposal;
  if (config.Linguistic()) {
    if (static_cast<int>(turn.utterance.size()) != config.utterance_length) {
      throw ConfigError("utterance must have exactly " +
                        std::to_string(config.utterance_length) + " tokens");
    }
    for (int token : turn.utterance) {
      if (token < 0 || token >= config.vocab_size) {
        throw ConfigError("utterance token outside the vocabulary");
      }
    }
    state.last_utterance[me] = turn.utterance;
  }
  if (config.Masked()) {
    CheckItems(turn.mask, 1, "mask");
    state.last_mask[me] = turn.mask;
  }
  ++state.turn;
  if (state.turn >= state.round_limit) state.outcome = Outcome::kTimeout;
  return state;
}

std::array<Items, 2> Allocation(const NegotiationState& state) {
  if (state.outcome != Outcome::kAccepted ||
      !IsValidProposal(*state.accepted, state.pool)) {
    throw UsageError("allocation is defined only for a valid accepted split");
  }
  std::array<Items, 2> out{};
  const Items& p = *state.accepted;
  for (int k = 0; k < kNumItemTypes; ++k) {
    out[state.proposer][k] = p[k];
    out[1 - state.proposer][k] = state.pool[k] - p[k];
  }
  return out;
}

namespace {

const Items& ValuingUtilities(const NegotiationState& state,
                              const NegotiationConfig& config, int agent) {
  return config.literal_reward && state.proposer >= 0
             ? state.utilities[state.proposer]
             : state.utilities[agent];
}

}  // namespace

std::array<double, 2> RawRewards(const NegotiationState& state,
                                 const NegotiationConfig& config) {
  if (!state.terminal()) throw UsageError("Rewards called on a live game");
  if (state.outcome == Outcome::kTimeout ||
      !IsValidProposal(*state.accepted, state.pool)) {
    return {0.0, 0.0};
  }
  const std::array<Items, 2> alloc = Allocation(state);
  std::array<double, 2> r{};
  for (int agent = 0; agent < 2; ++agent) {
    r[agent] = Dot(alloc[agent], ValuingUtilities(state, config, agent));
  }
  return r;
}

std::array<double, 2> Rewards(const NegotiationState& state,
                              const NegotiationConfig& config) {
  std::array<double, 2> r = RawRewards(state, config);
  for (int agent = 0; agent < 2; ++agent) {
    r[agent] /= Dot(state.pool, ValuingUtilities(state, config, agent));
  }
  return r;
}

int ObservationSize(const NegotiationConfig& config) {
  // utilities, pool, own proposal + flag, opponent proposal + flag,
  // opponent utterance + flag, opponent masked message.
  return 3 + 3 + 4 + 4 + config.utterance_length * config.vocab_size + 1 + 3;
}

void ObserveInto(const NegotiationState& state,
                 const NegotiationConfig& config, int agent,
                 Eigen::Ref<Eigen::VectorXd> out) {
  if (out.size() != ObservationSize(config)) {
    throw ConfigError("observation buffer has the wrong size");
  }
  out.setZero();
  const int other = 1 - agent;
  constexpr double kCountScale = 1.0 / kMaxItemCount;
  constexpr double kUtilityScale = 1.0 / kMaxUtility;
  for (int k = 0; k < kNumItemTypes; ++k) {
    out(k) = state.utilities[agent][k] * kUtilityScale;
    out(3 + k) = state.pool[k] * kCountScale;
  }
  if (const auto& own = state.last_proposal[agent]) {
    for (int k = 0; k < kNumItemTypes; ++k) out(6 + k) = (*own)[k] * kCountScale;
    out(9) = 1.0;
  }
  if (config.ProposalVisible() && state.last_proposal[other]) {
    for (int k = 0; k < kNumItemTypes; ++k) {
      out(10 + k) = (*state.last_proposal[other])[k] * kCountScale;
    }
    out(13) = 1.0;
  }
  const int utt_offset = 14;
  const int utt_size = config.utterance_length * config.vocab_size;
  if (config.Linguistic() && state.last_utterance[other]) {
    const std::vector<int>& utt = *state.last_utterance[other];
    for (int pos = 0; pos < config.utterance_length; ++pos) {
      out(utt_offset + pos * config.vocab_size + utt[pos]) = 1.0;
    }
    out(utt_offset + utt_size) = 1.0;
  }
  const int mask_offset = utt_offset + utt_size + 1;
  if (config.Masked() && state.last_mask[other] && state.last_proposal[other]) {
    const Items& m = *state.last_mask[other];
    for (int k = 0; k < kNumItemTypes; ++k) {
      out(mask_offset + k) =
          config.mask_reveals_utility
              ? m[k] * state.utilities[other][k] * kUtilityScale
              : m[k] * (*state.last_proposal[other])[k] * kCountScale;
    }
  }
}

Eigen::VectorXd Observe(const NegotiationState& state,
                        const NegotiationConfig& config, int agent) {
  Eigen::VectorXd out(ObservationSize(config));
  ObserveInto(state, config, agent, out);
  return out;
}

}  // namespace ecw::nego
