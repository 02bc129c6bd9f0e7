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

// Recurrent self-play policy for the negotiation game: an Elman cell over
// the observation and previous hidden state, with termination, proposal,
// utterance and mask heads read off the hidden state.

#ifndef ECW_NEGO_POLICY_H_
#define ECW_NEGO_POLICY_H_

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "ecw/nego/game.h"
#include "ecw/nnet/net.h"
#include "ecw/nnet/rng.h"

namespace ecw::nego {

inline constexpr int kProposalChoices = kMaxItemCount + 1;

// Head outputs for one batched step (one game per column).
struct PolicyOutput {
  Eigen::MatrixXd input;      // [obs; h_prev]
  Eigen::MatrixXd hidden;     // tanh(cell(input))
  Eigen::MatrixXd term;       // 1 x B logits
  Eigen::MatrixXd proposal;   // 3*6 x B logits, item-major
  Eigen::MatrixXd utterance;  // L*V x B logits, position-major (may be empty)
  Eigen::MatrixXd mask;       // 3 x B logits (may be empty)
};

// Upstream gradients for the heads of one step; empty matrices mean zero.
struct PolicyHeadGrads {
  Eigen::MatrixXd term, proposal, utterance, mask;
};

class AgentPolicy {
 public:
  AgentPolicy() = default;
  AgentPolicy(const NegotiationConfig& config, nnet::Rng& rng);

  int obs_dim() const { return obs_dim_; }
  int hidden_size() const { return hidden_; }
  bool has_utterance() const { return utterance.out_dim() > 0; }
  bool has_mask() const { return mask.out_dim() > 0; }

  PolicyOutput Forward(const Eigen::MatrixXd& obs,
                       const Eigen::MatrixXd& h_prev) const;
  // Accumulates parameter gradients for one step given the gradient w.r.t.
  // the step's hidden output (heads excluded) and the head gradients.
  // Returns the gradient w.r.t. h_prev.
  Eigen::MatrixXd Backward(const PolicyOutput& out,
                           const Eigen::MatrixXd& grad_hidden,
                           const PolicyHeadGrads& grads);

  std::vector<nnet::Dense*> Layers();
  void AdamStep(double learning_rate, const nnet::AdamConfig& adam);

  nnet::Dense cell, term, proposal, utterance, mask;
  std::int64_t step = 0;

 private:
  int obs_dim_ = 0;
  int hidden_ = 0;
};

nlohmann::json ToJson(const AgentPolicy& policy);

}  // namespace ecw::nego

#endif  // ECW_NEGO_POLICY_H_
