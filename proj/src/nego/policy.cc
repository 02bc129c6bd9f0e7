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

#include "ecw/nego/policy.h"

#include "ecw/errors.h"
#include "ecw/nnet/snapshot.h"

namespace ecw::nego {

AgentPolicy::AgentPolicy(const NegotiationConfig& config, nnet::Rng& rng)
    : obs_dim_(ObservationSize(config)), hidden_(config.hidden_size) {
  config.Validate();
  cell = nnet::InitDense(obs_dim_ + hidden_, hidden_, rng);
  term = nnet::InitDense(hidden_, 1, rng);
  proposal = nnet::InitDense(hidden_, kNumItemTypes * kProposalChoices, rng);
  utterance = config.Linguistic()
                  ? nnet::InitDense(hidden_,
                                    config.utterance_length * config.vocab_size,
                                    rng)
                  : nnet::Dense(hidden_, 0);
  mask = config.Masked() ? nnet::InitDense(hidden_, kNumItemTypes, rng)
                         : nnet::Dense(hidden_, 0);
}

PolicyOutput AgentPolicy::Forward(const Eigen::MatrixXd& obs,
                                  const Eigen::MatrixXd& h_prev) const {
  if (obs.rows() != obs_dim_ || h_prev.rows() != hidden_ ||
      obs.cols() != h_prev.cols()) {
    throw ConfigError("policy input has the wrong shape");
  }
  PolicyOutput out;
  out.input.resize(obs_dim_ + hidden_, obs.cols());
  out.input.topRows(obs_dim_) = obs;
  out.input.bottomRows(hidden_) = h_prev;
  out.hidden = cell.Apply(out.input).array().tanh().matrix();
  out.term = term.Apply(out.hidden);
  out.proposal = proposal.Apply(out.hidden);
  if (has_utterance()) out.utterance = utterance.Apply(out.hidden);
  if (has_mask()) out.mask = mask.Apply(out.hidden);
  return out;
}

Eigen::MatrixXd AgentPolicy::Backward(const PolicyOutput& out,
                                      const Eigen::MatrixXd& grad_hidden,
                                      const PolicyHeadGrads& grads) {
  if (out.input.size() == 0) throw UsageError("Backward without a forward pass");
  Eigen::MatrixXd g = grad_hidden;
  if (grads.term.size() > 0) g += term.Backprop(out.hidden, grads.term);
  if (grads.proposal.size() > 0) {
    g += proposal.Backprop(out.hidden, grads.proposal);
  }
  if (grads.utterance.size() > 0) {
    g += utterance.Backprop(out.hidden, grads.utterance);
  }
  if (grads.mask.size() > 0) g += mask.Backprop(out.hidden, grads.mask);
  const Eigen::MatrixXd pre_grad =
      g.cwiseProduct((1.0 - out.hidden.array().square()).matrix());
  const Eigen::MatrixXd grad_input = cell.Backprop(out.input, pre_grad);
  return grad_input.bottomRows(hidden_);
}

std::vector<nnet::Dense*> AgentPolicy::Layers() {
  std::vector<nnet::Dense*> layers = {&cell, &term, &proposal};
  if (has_utterance()) layers.push_back(&utterance);
  if (has_mask()) layers.push_back(&mask);
  return layers;
}

void AgentPolicy::AdamStep(double learning_rate, const nnet::AdamConfig& adam) {
  const std::vector<nnet::Dense*> layers = Layers();
  nnet::AdamStep(layers, step, learning_rate, adam);
}

nlohmann::json ToJson(const AgentPolicy& policy) {
  auto layer = [](const nnet::Dense& d) {
    return nlohmann::json{{"w", nnet::MatrixToJson(d.w)},
                          {"b", nnet::VectorToJson(d.b)}};
  };
  nlohmann::json heads = {{"term", layer(policy.term)},
                          {"proposal", layer(policy.proposal)}};
  if (policy.has_utterance()) heads["utterance"] = layer(policy.utterance);
  if (policy.has_mask()) heads["mask"] = layer(policy.mask);
  return {{"cell", "elman_tanh"},
          {"obs_dim", policy.obs_dim()},
          {"hidden_size", policy.hidden_size()},
          {"layers", nlohmann::json::array({layer(policy.cell)})},
          {"heads", heads},
          {"step", policy.step}};
}

}  // namespace ecw::nego
