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

// Hybrid training for the circular game: the sender is trained with
// REINFORCE (leave-one-out batch-mean baseline plus an entropy bonus), the
// receiver by backpropagating its own L1 loss through the action. The
// sampled message is a constant input to the receiver, so no receiver
// gradient reaches the sender.

#ifndef ECW_CIRCLE_TRAINER_H_
#define ECW_CIRCLE_TRAINER_H_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecw/circle/agents.h"
#include "ecw/circle/env.h"
#include "ecw/nnet/net.h"
#include "ecw/nnet/rng.h"

namespace ecw::circle {

// Epochs averaged into a run's final score.
inline constexpr int kFinalWindow = 10;
inline constexpr int kTestGridSize = 100;

struct TrainConfig {
  double bias_deg = 0.0;
  int epochs = 30;
  int batches_per_epoch = 250;
  int batch_size = 64;
  double sender_lr = 1e-3;
  double receiver_lr = 1e-3;
  double sender_entropy = 0.01;
  // Drawn by the sweep for symmetry with the sender; the receiver is
  // deterministic so this has no effect on training.
  double receiver_entropy = 0.0;
  MessageMode mode = MessageMode::kDiscrete;
  int vocab_size = 64;
  int sender_hidden = 64;
  int receiver_hidden = 64;
  std::uint64_t seed = 0;
  double circumference = kDefaultCircumference;
  // Evaluate on [0, 360) instead of [0, 180].
  bool eval_full_circle = false;
  nnet::AdamConfig adam;

  void Validate() const;
  GameConfig game() const { return {bias_deg, circumference}; }
};

nlohmann::json ToJson(const TrainConfig& config);
// Fields absent from doc keep their value from base.
TrainConfig TrainConfigFromJson(const nlohmann::json& doc,
                                TrainConfig base = {});

struct Agents {
  SenderPolicy sender;
  ReceiverPolicy receiver;
};

Agents MakeAgents(const TrainConfig& config, nnet::Rng& rng);

// One batch of sampled games with everything needed for both updates.
// Losses are in internal units.
struct BatchRollout {
  std::vector<Angle> targets;
  std::vector<Message> messages;
  std::vector<double> entropies;
  std::vector<Angle> actions;
  std::vector<double> loss_sender;
  std::vector<double> loss_receiver;
  nnet::ForwardResult sender_out;
  nnet::ForwardResult receiver_out;
};

BatchRollout Rollout(const SenderPolicy& sender,
                     const ReceiverPolicy& receiver,
                     const TrainConfig& config, std::span<const Angle> targets,
                     nnet::Rng& rng);

// baseline_i = mean of the other losses in the batch (0 for a batch of one).
std::vector<double> LeaveOneOutBaseline(std::span<const double> losses);

// Gradient of the sender surrogate
//   mean_i[(L_i - baseline_i) log pi(m_i) - lambda H(pi_i)]
// with respect to the sender's raw head outputs. Descending it lowers the
// expected sender loss.
std::map<std::string, Eigen::MatrixXd> SenderHeadGradients(
    const SenderPolicy& sender, const BatchRollout& rollout);

// d mean_i L_r,i / d raw receiver output.
Eigen::MatrixXd ReceiverHeadGradient(const BatchRollout& rollout,
                                     const TrainConfig& config);

struct BatchStats {
  double loss_sender_deg = 0.0;
  double loss_receiver_deg = 0.0;
  double entropy = 0.0;
};

struct TrainOptions {
  bool update_sender = true;
  bool update_receiver = true;
};

// Samples batch_size targets and applies one Adam step to each trainable
// agent. Throws DivergenceError on non-finite losses or gradients.
BatchStats TrainBatch(SenderPolicy& sender, ReceiverPolicy& receiver,
                      const TrainConfig& config, nnet::Rng& rng,
                      TrainOptions options = {});

// 100 equidistant targets on [0, 180] (or [0, 360) with eval_full_circle).
std::vector<Angle> TestGrid(const TrainConfig& config);

// Mean per-agent loss in degrees over the test grid at the expected action.
AgentLosses Evaluate(const SenderPolicy& sender,
                     const ReceiverPolicy& receiver,
                     const TrainConfig& config);

struct EpochRecord {
  int epoch = 0;
  double train_ls = 0.0;
  double train_lr = 0.0;
  double eval_ls = 0.0;
  double eval_lr = 0.0;
  double entropy = 0.0;
};

struct RunSummary {
  double eval_ls = 0.0;
  double eval_lr = 0.0;
  int window = 0;
};

struct RunRecord {
  std::vector<EpochRecord> epochs;
  // Mean of the last kFinalWindow eval losses; empty when no epoch ran or
  // the run failed.
  std::optional<RunSummary> summary;
  bool failed = false;
  std::string diagnostic;
};

std::optional<RunSummary> Summarize(std::span<const EpochRecord> epochs);

RunRecord Run(const TrainConfig& config, Agents* final_agents = nullptr);

// Writes config.json, metrics.csv, summary.json (and policy snapshots when
// agents are given). Refuses to write into a directory that already holds
// a metrics.csv.
void WriteRunDir(const std::filesystem::path& dir, const TrainConfig& config,
                 const RunRecord& record, const Agents* agents = nullptr);
RunRecord ReadRunDir(const std::filesystem::path& dir);

inline constexpr char kMetricsHeader[] =
    "epoch,train_ls,train_lr,eval_ls,eval_lr,entropy";

}  // namespace ecw::circle

#endif  // ECW_CIRCLE_TRAINER_H_
