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

#include "ecw/circle/trainer.h"

#include <cmath>
#include <sstream>

#include "ecw/errors.h"
#include "ecw/util/io.h"

namespace ecw::circle {

namespace fs = std::filesystem;
using nlohmann::json;

void TrainConfig::Validate() const {
  game().Validate();
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batches_per_epoch < 1) throw ConfigError("batches_per_epoch must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(sender_lr > 0.0) || !(receiver_lr > 0.0)) {
    throw ConfigError("learning rates must be > 0");
  }
  if (sender_entropy < 0.0 || receiver_entropy < 0.0) {
    throw ConfigError("entropy coefficients must be >= 0");
  }
  if (vocab_size < 1) throw ConfigError("vocab_size must be >= 1");
  if (sender_hidden < 1 || receiver_hidden < 1) {
    throw ConfigError("hidden sizes must be >= 1");
  }
}

json ToJson(const TrainConfig& c) {
  return {{"bias", c.bias_deg},
          {"epochs", c.epochs},
          {"batches_per_epoch", c.batches_per_epoch},
          {"batch_size", c.batch_size},
          {"sender_lr", c.sender_lr},
          {"receiver_lr", c.receiver_lr},
          {"sender_entropy", c.sender_entropy},
          {"receiver_entropy", c.receiver_entropy},
          {"mode", ToString(c.mode)},
          {"vocab_size", c.vocab_size},
          {"sender_hidden", c.sender_hidden},
          {"receiver_hidden", c.receiver_hidden},
          {"seed", c.seed},
          {"circumference", c.circumference},
          {"eval_full_circle", c.eval_full_circle},
          {"adam",
           {{"beta1", c.adam.beta1},
            {"beta2", c.adam.beta2},
            {"epsilon", c.adam.epsilon}}}};
}

TrainConfig TrainConfigFromJson(const json& doc, TrainConfig c) {
  if (!doc.is_object()) throw ConfigError("train config must be a JSON object");
  try {
    c.bias_deg = doc.value("bias", c.bias_deg);
    c.epochs = doc.value("epochs", c.epochs);
    c.batches_per_epoch = doc.value("batches_per_epoch", c.batches_per_epoch);
    c.batch_size = doc.value("batch_size", c.batch_size);
    c.sender_lr = doc.value("sender_lr", c.sender_lr);
    c.receiver_lr = doc.value("receiver_lr", c.receiver_lr);
    c.sender_entropy = doc.value("sender_entropy", c.sender_entropy);
    c.receiver_entropy = doc.value("receiver_entropy", c.receiver_entropy);
    if (doc.contains("mode")) {
      c.mode = ParseMessageMode(doc["mode"].get<std::string>());
    }
    c.vocab_size = doc.value("vocab_size", c.vocab_size);
    c.sender_hidden = doc.value("sender_hidden", c.sender_hidden);
    c.receiver_hidden = doc.value("receiver_hidden", c.receiver_hidden);
    c.seed = doc.value("seed", c.seed);
    c.circumference = doc.value("circumference", c.circumference);
    c.eval_full_circle = doc.value("eval_full_circle", c.eval_full_circle);
    if (doc.contains("adam")) {
      const json& a = doc["adam"];
      c.adam.beta1 = a.value("beta1", c.adam.beta1);
      c.adam.beta2 = a.value("beta2", c.adam.beta2);
      c.adam.epsilon = a.value("epsilon", c.adam.epsilon);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad train config: ") + e.what());
  }
  return c;
}

Agents MakeAgents(const TrainConfig& config, nnet::Rng& rng) {
  nnet::Rng sender_rng = rng.Split(1);
  nnet::Rng receiver_rng = rng.Split(2);
  return {MakeSender(config.mode, config.vocab_size, config.sender_hidden,
                     config.sender_entropy, sender_rng),
          MakeReceiver(config.mode, config.vocab_size, config.receiver_hidden,
                       receiver_rng)};
}

BatchRollout Rollout(const SenderPolicy& sender,
                     const ReceiverPolicy& receiver,
                     const TrainConfig& config, std::span<const Angle> targets,
                     nnet::Rng& rng) {
  const auto batch = static_cast<Eigen::Index>(targets.size());
  BatchRollout r;
  r.targets.assign(targets.begin(), targets.end());

  Eigen::MatrixXd sender_in(2, batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    sender_in.col(i) = EncodeTarget(targets[i]);
  }
  r.sender_out = nnet::Forward(sender.params, sender.spec, sender_in);

  const bool discrete = sender.mode == MessageMode::kDiscrete;
  Eigen::MatrixXd receiver_in =
      Eigen::MatrixXd::Zero(discrete ? sender.vocab_size : 1, batch);
  r.messages.reserve(batch);
  r.entropies.reserve(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    MessageDistribution dist =
        discrete ? DistributionFromHeads(
                       sender.mode, r.sender_out.heads.at(kLogitsHead).col(i), 0)
                 : DistributionFromHeads(
                       sender.mode, r.sender_out.heads.at(kMeanHead).col(i),
                       r.sender_out.heads.at(kSpreadHead)(0, i));
    MessageDraw draw = SampleMessage(dist, rng);
    if (discrete) {
      receiver_in(std::get<DiscreteToken>(draw.message).index, i) = 1.0;
    } else {
      receiver_in(0, i) = std::get<ContinuousScalar>(draw.message).value;
    }
    r.messages.push_back(draw.message);
    r.entropies.push_back(draw.entropy);
  }
  r.receiver_out = nnet::Forward(receiver.params, receiver.spec, receiver_in);

  const GameConfig game = config.game();
  const double units_per_degree = 1.0 / game.DegreesPerUnit();
  const Eigen::MatrixXd& raw = r.receiver_out.heads.at(kActionHead);
  for (Eigen::Index i = 0; i < batch; ++i) {
    if (!std::isfinite(raw(0, i))) {
      throw DivergenceError("receiver produced a non-finite action");
    }
    const Angle action = WrapUnits(raw(0, i), game.circumference);
    const AgentLosses l = Losses(targets[i], game.bias_deg, action);
    r.actions.push_back(action);
    r.loss_sender.push_back(l.sender * units_per_degree);
    r.loss_receiver.push_back(l.receiver * units_per_degree);
  }
  return r;
}

std::vector<double> LeaveOneOutBaseline(std::span<const double> losses) {
  const std::size_t n = losses.size();
  std::vector<double> baseline(n, 0.0);
  if (n < 2) return baseline;
  double total = 0.0;
  for (double l : losses) total += l;
  for (std::size_t i = 0; i < n; ++i) {
    baseline[i] = (total - losses[i]) / static_cast<double>(n - 1);
  }
  return baseline;
}

std::map<std::string, Eigen::MatrixXd> SenderHeadGradients(
    const SenderPolicy& sender, const BatchRollout& rollout) {
  const auto batch = static_cast<Eigen::Index>(rollout.targets.size());
  const double scale = 1.0 / static_cast<double>(batch);
  const std::vector<double> baseline =
      LeaveOneOutBaseline(rollout.loss_sender);
  const double lambda = sender.entropy_coeff;
  std::map<std::string, Eigen::MatrixXd> grads;

  if (sender.mode == MessageMode::kDiscrete) {
    const Eigen::MatrixXd& logits = rollout.sender_out.heads.at(kLogitsHead);
    Eigen::MatrixXd g(logits.rows(), batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
      const Eigen::VectorXd p = Softmax(logits.col(i));
      const double advantage = rollout.loss_sender[i] - baseline[i];
      Eigen::VectorXd score = -p;
      score(std::get<DiscreteToken>(rollout.messages[i]).index) += 1.0;
      g.col(i) = scale * (advantage * score -
                          lambda * CategoricalEntropyGradient(p));
    }
    grads.emplace(kLogitsHead, std::move(g));
  } else {
    const Eigen::MatrixXd& mean = rollout.sender_out.heads.at(kMeanHead);
    const Eigen::MatrixXd& spread = rollout.sender_out.heads.at(kSpreadHead);
    Eigen::MatrixXd g_mean(1, batch);
    Eigen::MatrixXd g_spread(1, batch);
    for (Eigen::Index i = 0; i < batch; ++i) {
      const double mu = mean(0, i);
      const double sigma = SpreadFromRaw(sender.mode, spread(0, i));
      const double dsigma = SpreadDerivative(sender.mode, spread(0, i));
      const double x = std::get<ContinuousScalar>(rollout.messages[i]).value;
      const double advantage = rollout.loss_sender[i] - baseline[i];
      const double z = (x - mu) / sigma;
      // d log N(x; mu, sigma): (x - mu) / sigma^2 and (z^2 - 1) / sigma.
      g_mean(0, i) = scale * advantage * z / sigma;
      g_spread(0, i) =
          scale * (advantage * (z * z - 1.0) / sigma - lambda / sigma) * dsigma;
    }
    grads.emplace(kMeanHead, std::move(g_mean));
    grads.emplace(kSpreadHead, std::move(g_spread));
  }
  return grads;
}

Eigen::MatrixXd ReceiverHeadGradient(const BatchRollout& rollout,
                                     const TrainConfig& config) {
  const auto batch = static_cast<Eigen::Index>(rollout.targets.size());
  Eigen::MatrixXd g(1, batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const Angle target = ReceiverTarget(rollout.targets[i], config.bias_deg);
    // The wrap is piecewise identity, so d action / d raw = 1.
    g(0, i) = CircularL1Subgradient(target, rollout.actions[i]) /
              static_cast<double>(batch);
  }
  return g;
}

BatchStats TrainBatch(SenderPolicy& sender, ReceiverPolicy& receiver,
                      const TrainConfig& config, nnet::Rng& rng,
                      TrainOptions options) {
  std::vector<Angle> targets(config.batch_size);
  for (Angle& t : targets) t = SampleTarget(rng);
  BatchRollout rollout = Rollout(sender, receiver, config, targets, rng);

  BatchStats stats;
  const double deg = config.game().DegreesPerUnit();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    stats.loss_sender_deg += rollout.loss_sender[i] * deg;
    stats.loss_receiver_deg += rollout.loss_receiver[i] * deg;
    stats.entropy += rollout.entropies[i];
  }
  const double n = static_cast<double>(targets.size());
  stats.loss_sender_deg /= n;
  stats.loss_receiver_deg /= n;
  stats.entropy /= n;
  if (!std::isfinite(stats.loss_sender_deg) ||
      !std::isfinite(stats.loss_receiver_deg) || !std::isfinite(stats.entropy)) {
    throw DivergenceError("non-finite batch loss");
  }

  if (options.update_receiver) {
    nnet::Backward(receiver.params, receiver.spec, rollout.receiver_out.cache,
                   {{kActionHead, ReceiverHeadGradient(rollout, config)}});
    nnet::AdamStep(receiver.params, config.receiver_lr, config.adam);
  }
  if (options.update_sender) {
    nnet::Backward(sender.params, sender.spec, rollout.sender_out.cache,
                   SenderHeadGradients(sender, rollout));
    nnet::AdamStep(sender.params, config.sender_lr, config.adam);
  }
  return stats;
}

std::vector<Angle> TestGrid(const TrainConfig& config) {
  std::vector<Angle> grid;
  grid.reserve(kTestGridSize);
  for (int i = 0; i < kTestGridSize; ++i) {
    grid.emplace_back(config.eval_full_circle
                          ? i * kFullTurnDeg / kTestGridSize
                          : i * 180.0 / (kTestGridSize - 1));
  }
  return grid;
}

AgentLosses Evaluate(const SenderPolicy& sender,
                     const ReceiverPolicy& receiver,
                     const TrainConfig& config) {
  const std::vector<Angle> grid = TestGrid(config);
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd inputs(2, n);
  for (Eigen::Index i = 0; i < n; ++i) inputs.col(i) = EncodeTarget(grid[i]);
  const nnet::ForwardResult out =
      nnet::Forward(sender.params, sender.spec, inputs);
  const GameConfig game = config.game();

  std::vector<Angle> actions;
  actions.reserve(grid.size());
  if (sender.mode == MessageMode::kDiscrete) {
    const std::vector<Angle> token_actions =
        TokenActions(receiver, game.circumference);
    for (Eigen::Index i = 0; i < n; ++i) {
      const MessageDistribution dist = DistributionFromHeads(
          sender.mode, out.heads.at(kLogitsHead).col(i), 0.0);
      actions.push_back(
          ExpectedAction(dist, token_actions, receiver, game.circumference));
    }
  } else {
    const Eigen::MatrixXd& means = out.heads.at(kMeanHead);
    if (!means.allFinite()) {
      throw DivergenceError("sender network produced a non-finite output");
    }
    const nnet::ForwardResult act =
        nnet::Forward(receiver.params, receiver.spec, Eigen::MatrixXd(means));
    for (Eigen::Index i = 0; i < n; ++i) {
      actions.push_back(
          WrapUnits(act.heads.at(kActionHead)(0, i), game.circumference));
    }
  }

  AgentLosses mean;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const AgentLosses l = Losses(grid[i], game.bias_deg, actions[i]);
    mean.sender += l.sender;
    mean.receiver += l.receiver;
  }
  mean.sender /= static_cast<double>(grid.size());
  mean.receiver /= static_cast<double>(grid.size());
  return mean;
}

std::optional<RunSummary> Summarize(std::span<const EpochRecord> epochs) {
  if (epochs.empty()) return std::nullopt;
  const std::size_t window =
      std::min<std::size_t>(kFinalWindow, epochs.size());
  RunSummary s;
  s.window = static_cast<int>(window);
  for (std::size_t i = epochs.size() - window; i < epochs.size(); ++i) {
    s.eval_ls += epochs[i].eval_ls;
    s.eval_lr += epochs[i].eval_lr;
  }
  s.eval_ls /= static_cast<double>(window);
  s.eval_lr /= static_cast<double>(window);
  return s;
}

RunRecord Run(const TrainConfig& config, Agents* final_agents) {
  config.Validate();
  nnet::Rng root(config.seed);
  nnet::Rng init_rng = root.Split(0);
  nnet::Rng train_rng = root.Split(1);
  Agents agents = MakeAgents(config, init_rng);

  RunRecord record;
  try {
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      EpochRecord rec;
      rec.epoch = epoch;
      for (int b = 0; b < config.batches_per_epoch; ++b) {
        const BatchStats s =
            TrainBatch(agents.sender, agents.receiver, config, train_rng);
        rec.train_ls += s.loss_sender_deg;
        rec.train_lr += s.loss_receiver_deg;
        rec.entropy += s.entropy;
      }
      rec.train_ls /= config.batches_per_epoch;
      rec.train_lr /= config.batches_per_epoch;
      rec.entropy /= config.batches_per_epoch;
      const AgentLosses eval = Evaluate(agents.sender, agents.receiver, config);
      rec.eval_ls = eval.sender;
      rec.eval_lr = eval.receiver;
      record.epochs.push_back(rec);
    }
    record.summary = Summarize(record.epochs);
  } catch (const DivergenceError& e) {
    record.failed = true;
    record.diagnostic = "epoch " + std::to_string(record.epochs.size()) +
                        ": " + e.what();
  }
  if (final_agents != nullptr) *final_agents = std::move(agents);
  return record;
}

void WriteRunDir(const fs::path& dir, const TrainConfig& config,
                 const RunRecord& record, const Agents* agents) {
  util::PrepareOutputDir(dir, {"metrics.csv", "summary.json"});
  util::WriteJsonFile(dir / "config.json", ToJson(config));

  std::ostringstream csv;
  csv << kMetricsHeader << '\n';
  for (const EpochRecord& e : record.epochs) {
    csv << e.epoch << ',' << util::FormatDouble(e.train_ls) << ','
        << util::FormatDouble(e.train_lr) << ','
        << util::FormatDouble(e.eval_ls) << ','
        << util::FormatDouble(e.eval_lr) << ','
        << util::FormatDouble(e.entropy) << '\n';
  }
  util::WriteTextFile(dir / "metrics.csv", csv.str());

  json summary = {{"defined", record.summary.has_value()},
                  {"failed", record.failed},
                  {"diagnostic", record.diagnostic},
                  {"epochs", record.epochs.size()}};
  if (record.summary) {
    summary["eval_ls"] = record.summary->eval_ls;
    summary["eval_lr"] = record.summary->eval_lr;
    summary["window"] = record.summary->window;
  } else {
    summary["eval_ls"] = nullptr;
    summary["eval_lr"] = nullptr;
    summary["window"] = 0;
  }
  util::WriteJsonFile(dir / "summary.json", summary);

  if (agents != nullptr) {
    util::WriteJsonFile(dir / "sender.json", ToJson(agents->sender));
    util::WriteJsonFile(dir / "receiver.json", ToJson(agents->receiver));
  }
}

RunRecord ReadRunDir(const fs::path& dir) {
  const util::CsvTable table = util::CsvTable::Load(dir / "metrics.csv");
  RunRecord record;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    EpochRecord e;
    e.epoch = static_cast<int>(table.Number(r, "epoch"));
    e.train_ls = table.Number(r, "train_ls");
    e.train_lr = table.Number(r, "train_lr");
    e.eval_ls = table.Number(r, "eval_ls");
    e.eval_lr = table.Number(r, "eval_lr");
    e.entropy = table.Number(r, "entropy");
    record.epochs.push_back(e);
  }
  const fs::path summary_path = dir / "summary.json";
  if (fs::exists(summary_path)) {
    const json summary = util::ReadJsonFile(summary_path);
    record.failed = summary.value("failed", false);
    record.diagnostic = summary.value("diagnostic", std::string());
  }
  if (!record.failed) record.summary = Summarize(record.epochs);
  return record;
}

}  // namespace ecw::circle
