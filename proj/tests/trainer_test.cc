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

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "ecw/circle/trainer.h"
#include "ecw/errors.h"
#include "ecw/util/io.h"
#include "test_policies.h"

namespace ecw::circle {
namespace {

namespace fs = std::filesystem;
using Eigen::VectorXd;
using testing::ConstantSender;

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ecw_trainer_" + name);
  fs::remove_all(dir);
  return dir;
}

TrainConfig SmallConfig() {
  TrainConfig c;
  c.epochs = 3;
  c.batches_per_epoch = 20;
  c.batch_size = 16;
  c.vocab_size = 8;
  c.sender_hidden = 16;
  c.receiver_hidden = 16;
  return c;
}

TEST_CASE("config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.Validate());
  c.batch_size = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.sender_lr = 0.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.vocab_size = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("config json round trip") {
  TrainConfig c = SmallConfig();
  c.bias_deg = 37.5;
  c.mode = MessageMode::kGaussianLogVar;
  c.seed = 99;
  c.sender_lr = 3e-4;
  const TrainConfig back = TrainConfigFromJson(ToJson(c));
  CHECK(ToJson(back) == ToJson(c));
  CHECK_THROWS_AS(TrainConfigFromJson(nlohmann::json::array()), ConfigError);
}

TEST_CASE("leave-one-out baseline") {
  const std::vector<double> l = {1.0, 2.0, 6.0};
  const std::vector<double> b = LeaveOneOutBaseline(l);
  CHECK(b[0] == doctest::Approx(4.0));
  CHECK(b[1] == doctest::Approx(3.5));
  CHECK(b[2] == doctest::Approx(1.5));
  CHECK(LeaveOneOutBaseline(std::vector<double>{5.0})[0] == 0.0);
}

TEST_CASE("equal losses cancel every advantage") {
  const SenderPolicy s = ConstantSender(VectorXd::LinSpaced(4, -1, 1));
  ReceiverPolicy r = testing::LookupReceiver({0, 0, 0, 0});
  TrainConfig c = SmallConfig();
  c.vocab_size = 4;
  nnet::Rng rng(1);
  const std::vector<Angle> targets(32, Angle(30));
  const BatchRollout roll = Rollout(s, r, c, targets, rng);
  for (double l : roll.loss_sender) CHECK(l == roll.loss_sender.front());
  const auto grads = SenderHeadGradients(s, roll);
  CHECK(grads.at(kLogitsHead).cwiseAbs().maxCoeff() == 0.0);
}

// Enumerating both tokens gives the exact gradient of the expected sender
// loss over the logits: p_j (L_j - E[L]).
TEST_CASE("two-token REINFORCE gradient matches enumeration") {
  VectorXd logits(2);
  logits << 0.3, -0.2;
  const SenderPolicy s = ConstantSender(logits);
  const ReceiverPolicy r = testing::LookupReceiver({0.0, 18.0});
  TrainConfig c;
  c.vocab_size = 2;
  const VectorXd p = Softmax(logits);
  const VectorXd loss = (VectorXd(2) << 0.0, 18.0).finished();
  const double expected = p.dot(loss);
  const VectorXd exact = p.cwiseProduct(loss.array().matrix() -
                                        VectorXd::Constant(2, expected));

  nnet::Rng rng(2);
  const int batches = 100000;
  const std::vector<Angle> targets(2, Angle(0));
  VectorXd acc = VectorXd::Zero(2);
  for (int b = 0; b < batches; ++b) {
    const BatchRollout roll = Rollout(s, r, c, targets, rng);
    acc += SenderHeadGradients(s, roll).at(kLogitsHead).rowwise().sum();
  }
  acc /= batches;
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(acc(j) - exact(j)) < 0.02 * std::abs(exact(j)));
  }
}

TEST_CASE("receiver gradient is the mean subgradient") {
  const SenderPolicy s = ConstantSender(VectorXd::Zero(2));
  const ReceiverPolicy r = testing::LookupReceiver({1.0, 1.0});
  TrainConfig c;
  c.vocab_size = 2;
  nnet::Rng rng(3);
  const std::vector<Angle> targets = {Angle(40), Angle(0), Angle(10)};
  const BatchRollout roll = Rollout(s, r, c, targets, rng);
  const Eigen::MatrixXd g = ReceiverHeadGradient(roll, c);
  CHECK(g(0, 0) == doctest::Approx(-1.0 / 3));
  CHECK(g(0, 1) == doctest::Approx(1.0 / 3));
  CHECK(g(0, 2) == 0.0);
}

// A frozen sender that ignores the target leaves nothing to learn: every
// receiver has expected loss 90 under uniform targets. The smoke run
// therefore freezes an informative sender instead.
TEST_CASE("receiver-only training lowers the receiver loss") {
  TrainConfig c;
  c.vocab_size = 36;
  nnet::Rng init(4);
  SenderPolicy s = testing::NearestTokenSender(36, 2000.0);
  ReceiverPolicy r = MakeReceiver(MessageMode::kDiscrete, 36, 64, init);
  const SenderPolicy frozen = s;
  nnet::Rng rng(5);
  std::vector<double> curve = {Evaluate(s, r, c).receiver};
  for (int epoch = 0; epoch < 5; ++epoch) {
    for (int b = 0; b < 250; ++b) {
      TrainBatch(s, r, c, rng, TrainOptions{.update_sender = false});
    }
    curve.push_back(Evaluate(s, r, c).receiver);
  }
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] <= curve[i - 1] + 0.5);
  CHECK(curve.back() < curve.front() - 20.0);
  CHECK(s.params.heads[0].w == frozen.params.heads[0].w);
}

TEST_CASE("constructed 36-token protocol is near exact") {
  TrainConfig c;
  c.vocab_size = 36;
  const SenderPolicy s = testing::NearestTokenSender(36, 2000.0);
  std::vector<double> units(36);
  std::iota(units.begin(), units.end(), 0.0);
  const ReceiverPolicy r = testing::LookupReceiver(units);
  const AgentLosses l = Evaluate(s, r, c);
  CHECK(l.sender <= 5.0);
  CHECK(l.receiver <= 5.0);
  c.eval_full_circle = true;
  CHECK(Evaluate(s, r, c).sender <= 5.0);
}

TEST_CASE("untrained pairs sit near the non-communication loss") {
  TrainConfig c;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    nnet::Rng rng(seed);
    const Agents a = MakeAgents(c, rng);
    const AgentLosses l = Evaluate(a.sender, a.receiver, c);
    if (l.sender >= 60 && l.sender <= 120 && l.receiver >= 60 && l.receiver <= 120) {
      ++inside;
    }
  }
  CHECK(inside >= 95);
}

TEST_CASE("test grid") {
  TrainConfig c;
  const std::vector<Angle> g = TestGrid(c);
  CHECK(g.size() == 100);
  CHECK(g.front().degrees() == 0.0);
  CHECK(g.back().degrees() == doctest::Approx(180.0));
  c.eval_full_circle = true;
  CHECK(TestGrid(c).back().degrees() == doctest::Approx(356.4));
}

TEST_CASE("evaluation is deterministic") {
  TrainConfig c;
  nnet::Rng rng(6);
  const Agents a = MakeAgents(c, rng);
  const AgentLosses x = Evaluate(a.sender, a.receiver, c);
  const AgentLosses y = Evaluate(a.sender, a.receiver, c);
  CHECK(x.sender == y.sender);
  CHECK(x.receiver == y.receiver);
}

TEST_CASE("strong entropy bonus keeps the sender near uniform") {
  TrainConfig c;
  c.epochs = 5;
  c.sender_entropy = 1.0;
  const RunRecord rec = Run(c);
  REQUIRE(rec.epochs.size() == 5);
  for (const EpochRecord& e : rec.epochs) {
    CHECK(e.entropy >= 0.95 * std::log(static_cast<double>(c.vocab_size)));
  }
}

TEST_CASE("runs are bit-reproducible") {
  for (MessageMode m : {MessageMode::kDiscrete, MessageMode::kGaussianVar}) {
    TrainConfig c = SmallConfig();
    c.mode = m;
    c.seed = 11;
    const RunRecord x = Run(c);
    const RunRecord y = Run(c);
    REQUIRE(x.epochs.size() == y.epochs.size());
    for (std::size_t i = 0; i < x.epochs.size(); ++i) {
      CHECK(x.epochs[i].train_ls == y.epochs[i].train_ls);
      CHECK(x.epochs[i].eval_lr == y.epochs[i].eval_lr);
      CHECK(x.epochs[i].entropy == y.epochs[i].entropy);
    }
    c.seed = 12;
    CHECK(Run(c).epochs.back().train_ls != x.epochs.back().train_ls);
  }
}

TEST_CASE("zero epochs give an empty record") {
  TrainConfig c = SmallConfig();
  c.epochs = 0;
  const RunRecord rec = Run(c);
  CHECK(rec.epochs.empty());
  CHECK_FALSE(rec.summary.has_value());
  CHECK_FALSE(rec.failed);
}

TEST_CASE("summary averages the final window") {
  std::vector<EpochRecord> e(12);
  for (int i = 0; i < 12; ++i) {
    e[i].eval_ls = i;
    e[i].eval_lr = 2 * i;
  }
  const auto s = Summarize(e);
  REQUIRE(s.has_value());
  CHECK(s->eval_ls == doctest::Approx(6.5));
  CHECK(s->eval_lr == doctest::Approx(13.0));
  CHECK(s->window == 10);
  CHECK(Summarize(std::span<const EpochRecord>(e.data(), 3))->window == 3);
}

TEST_CASE("eval losses stay on the half circle") {
  TrainConfig c = SmallConfig();
  c.bias_deg = 90;
  for (const EpochRecord& e : Run(c).epochs) {
    CHECK(e.eval_ls >= 0.0);
    CHECK(e.eval_ls <= 180.0);
    CHECK(e.eval_lr >= 0.0);
    CHECK(e.eval_lr <= 180.0);
  }
}

TEST_CASE("run directory round trip") {
  TrainConfig c = SmallConfig();
  Agents agents;
  const RunRecord rec = Run(c, &agents);
  const fs::path dir = FreshDir("roundtrip");
  WriteRunDir(dir, c, rec, &agents);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "sender.json"));
  CHECK(util::ReadTextFile(dir / "metrics.csv").rfind(kMetricsHeader, 0) == 0);
  const RunRecord back = ReadRunDir(dir);
  REQUIRE(back.epochs.size() == rec.epochs.size());
  for (std::size_t i = 0; i < rec.epochs.size(); ++i) {
    CHECK(back.epochs[i].eval_ls == rec.epochs[i].eval_ls);
    CHECK(back.epochs[i].entropy == rec.epochs[i].entropy);
  }
  CHECK(back.summary->eval_lr == rec.summary->eval_lr);
  const nlohmann::json summary = util::ReadJsonFile(dir / "summary.json");
  CHECK(summary["window"] == 3);
  CHECK_THROWS_AS(WriteRunDir(dir, c, rec), UsageError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ecw::circle
