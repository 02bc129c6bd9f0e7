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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "doctest.h"
#include "ecw/circle/agents.h"
#include "ecw/errors.h"
#include "ecw/nnet/rng.h"

namespace ecw::circle {
namespace {

using Eigen::VectorXd;

void ZeroWeights(nnet::NetParams& p) {
  for (nnet::Dense* d : nnet::Layers(p)) d->w.setZero();
}

TEST_CASE("mode names round trip") {
  for (MessageMode m : {MessageMode::kDiscrete, MessageMode::kGaussianVar,
                        MessageMode::kGaussianLogVar}) {
    CHECK(ParseMessageMode(ToString(m)) == m);
  }
  CHECK_THROWS_AS(ParseMessageMode("gumbel"), ConfigError);
}

TEST_CASE("target encoding") {
  const Eigen::Vector2d e0 = EncodeTarget(Angle(0));
  CHECK(e0(0) == doctest::Approx(0.0));
  CHECK(e0(1) == doctest::Approx(1.0));
  const Eigen::Vector2d e90 = EncodeTarget(Angle(90));
  CHECK(e90(0) == doctest::Approx(1.0));
  CHECK(std::abs(e90(1)) < 1e-15);
}

TEST_CASE("target encoding is injective on a fine grid") {
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k < 36000; ++k) {
    const Eigen::Vector2d e = EncodeTarget(Angle(k * 0.01));
    pts.emplace_back(e(0), e(1));
  }
  std::vector<std::pair<double, double>> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double d = std::hypot(sorted[i].first - sorted[i - 1].first,
                                sorted[i].second - sorted[i - 1].second);
    CHECK(d > 1e-9);
  }
}

TEST_CASE("message encoding") {
  const VectorXd one_hot = EncodeMessage(DiscreteToken{3}, 5);
  VectorXd want(5);
  want << 0, 0, 0, 1, 0;
  CHECK(one_hot == want);
  for (int k = 0; k < 7; ++k) CHECK(EncodeMessage(DiscreteToken{k}, 7).sum() == 1.0);
  const VectorXd scalar = EncodeMessage(ContinuousScalar{2.5}, 1);
  CHECK(scalar.size() == 1);
  CHECK(scalar(0) == 2.5);
  CHECK_THROWS_AS((EncodeMessage(DiscreteToken{5}, 5)), ConfigError);
  CHECK_THROWS_AS((EncodeMessage(DiscreteToken{-1}, 5)), ConfigError);
  CHECK_THROWS_AS((EncodeMessage(ContinuousScalar{std::nan("")}, 1)), ConfigError);
}

TEST_CASE("zero-weight categorical sender is uniform") {
  nnet::Rng rng(1);
  SenderPolicy s = MakeSender(MessageMode::kDiscrete, 4, 8, 0.0, rng);
  ZeroWeights(s.params);
  const auto dist = std::get<Categorical>(SenderDistribution(s, Angle(77)));
  for (int k = 0; k < 4; ++k) CHECK(dist.probs(k) == doctest::Approx(0.25));
}

TEST_CASE("spread parameterizations") {
  CHECK(SpreadFromRaw(MessageMode::kGaussianLogVar, 0.0) == 1.0);
  CHECK(SpreadFromRaw(MessageMode::kGaussianVar, 0.0) ==
        doctest::Approx(std::log(2.0) + kSpreadFloor));
  CHECK(SpreadFromRaw(MessageMode::kGaussianVar, -800.0) >= kSpreadFloor);
  CHECK_THROWS_AS(SpreadFromRaw(MessageMode::kDiscrete, 0.0), UsageError);
  for (MessageMode m : {MessageMode::kGaussianVar, MessageMode::kGaussianLogVar}) {
    for (double raw : {-3.0, -0.2, 0.0, 0.7, 4.0}) {
      const double h = 1e-6;
      const double num = (SpreadFromRaw(m, raw + h) - SpreadFromRaw(m, raw - h)) / (2 * h);
      CHECK(SpreadDerivative(m, raw) == doctest::Approx(num).epsilon(1e-6));
    }
  }
}

TEST_CASE("probabilities are normalized on random nets") {
  nnet::Rng rng(2);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    SenderPolicy s = MakeSender(MessageMode::kDiscrete, 16, 8, 0.0, rng);
    for (nnet::Dense* d : nnet::Layers(s.params)) {
      for (int j = 0; j < d->b.size(); ++j) d->b(j) = rng.Uniform(-3, 3);
    }
    const auto dist = std::get<Categorical>(SenderDistribution(s, Angle(rng.Uniform(0, 360))));
    worst = std::max(worst, std::abs(dist.probs.sum() - 1.0));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("gaussian spread stays positive on random nets") {
  nnet::Rng rng(3);
  for (MessageMode m : {MessageMode::kGaussianVar, MessageMode::kGaussianLogVar}) {
    for (int i = 0; i < 5000; ++i) {
      SenderPolicy s = MakeSender(m, 1, 4, 0.0, rng);
      for (nnet::Dense* d : nnet::Layers(s.params)) {
        for (int j = 0; j < d->b.size(); ++j) d->b(j) = rng.Uniform(-5, 5);
      }
      const auto g = std::get<Gaussian>(SenderDistribution(s, Angle(rng.Uniform(0, 360))));
      CHECK(g.stddev > 0.0);
    }
  }
}

TEST_CASE("non-finite network output is a divergence") {
  VectorXd logits(2);
  logits << 0.0, std::nan("");
  CHECK_THROWS_AS(DistributionFromHeads(MessageMode::kDiscrete, logits, 0.0),
                  DivergenceError);
  VectorXd mean(1);
  mean << 0.0;
  CHECK_THROWS_AS(DistributionFromHeads(MessageMode::kGaussianVar, mean,
                                        std::numeric_limits<double>::infinity()),
                  DivergenceError);
}

TEST_CASE("closed-form entropies") {
  CHECK(CategoricalEntropy(VectorXd::Constant(4, 0.25)) == doctest::Approx(std::log(4.0)));
  CHECK(GaussianEntropy(1.0) ==
        doctest::Approx(0.5 * std::log(2 * std::numbers::pi * std::numbers::e)));
  CHECK(GaussianEntropy(1.0) == doctest::Approx(1.4189).epsilon(1e-4));
  CHECK(GaussianEntropy(0.25) == doctest::Approx(0.5 * std::log(2 * std::numbers::pi *
                                                                std::numbers::e * 0.0625)));
  // A log-variance head at 800 gives a finite sigma but an infinite sigma^2.
  const double wide = SpreadFromRaw(MessageMode::kGaussianLogVar, 800.0);
  REQUIRE(std::isfinite(wide));
  CHECK(GaussianEntropy(wide) ==
        doctest::Approx(0.5 * std::log(2 * std::numbers::pi * std::numbers::e) + 400.0));
  nnet::Rng rng(4);
  const MessageDraw d = SampleMessage(Categorical{VectorXd::Constant(4, 0.25)}, rng);
  CHECK(d.entropy == doctest::Approx(std::log(4.0)));
}

TEST_CASE("log probabilities are exact") {
  nnet::Rng rng(5);
  VectorXd logits(5);
  logits << 0.3, -1.0, 2.0, 0.0, -0.5;
  const Categorical cat{Softmax(logits)};
  for (int i = 0; i < 200; ++i) {
    const MessageDraw d = SampleMessage(cat, rng);
    const int k = std::get<DiscreteToken>(d.message).index;
    CHECK(std::exp(d.log_prob) == doctest::Approx(cat.probs(k)).epsilon(1e-15));
  }
  const Gaussian g{0.4, 1.7};
  for (int i = 0; i < 200; ++i) {
    const MessageDraw d = SampleMessage(g, rng);
    const double x = std::get<ContinuousScalar>(d.message).value;
    const double z = (x - g.mean) / g.stddev;
    const double want = -0.5 * z * z - std::log(g.stddev) - 0.5 * std::log(2 * std::numbers::pi);
    CHECK(std::abs(d.log_prob - want) < 1e-10);
  }
}

TEST_CASE("token frequencies match probabilities") {
  nnet::Rng rng(6);
  VectorXd p(5);
  p << 0.05, 0.4, 0.15, 0.3, 0.1;
  const int n = 1000000;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < n; ++i) ++counts[SampleToken(p, rng)];
  for (int k = 0; k < 5; ++k) {
    const double sd = std::sqrt(n * p(k) * (1 - p(k)));
    CHECK(std::abs(counts[k] - n * p(k)) < 3 * sd);
  }
}

TEST_CASE("entropy gradient matches finite differences") {
  nnet::Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd z(6);
    for (int i = 0; i < 6; ++i) z(i) = rng.Uniform(-2, 2);
    const VectorXd g = CategoricalEntropyGradient(Softmax(z));
    for (int i = 0; i < 6; ++i) {
      VectorXd zp = z, zm = z;
      zp(i) += 1e-5;
      zm(i) -= 1e-5;
      const double num = (CategoricalEntropy(Softmax(zp)) - CategoricalEntropy(Softmax(zm))) / 2e-5;
      CHECK(std::abs(g(i) - num) <= std::max(1e-6, 1e-4 * std::abs(num)));
    }
  }
}

TEST_CASE("receiver output wraps onto the circle") {
  CHECK(WrapUnits(37, 36).degrees() == doctest::Approx(10));
  CHECK(WrapUnits(-1, 36).degrees() == doctest::Approx(350));
  nnet::Rng rng(8);
  ReceiverPolicy r = MakeReceiver(MessageMode::kDiscrete, 4, 8, rng);
  ZeroWeights(r.params);
  r.params.heads[0].b(0) = 40.0;
  for (int k = 0; k < 4; ++k) {
    CHECK(ReceiverAction(r, DiscreteToken{k}, 36).degrees() == doctest::Approx(40));
  }
}

TEST_CASE("receiver is deterministic") {
  nnet::Rng rng(9);
  const ReceiverPolicy r = MakeReceiver(MessageMode::kGaussianVar, 1, 16, rng);
  const Angle a = ReceiverAction(r, ContinuousScalar{0.37}, 36);
  CHECK(ReceiverAction(r, ContinuousScalar{0.37}, 36) == a);
  const std::vector<Angle> t = TokenActions(MakeReceiver(MessageMode::kDiscrete, 3, 8, rng), 36);
  CHECK(t.size() == 3);
}

TEST_CASE("weighted circular mean") {
  const std::vector<Angle> a = {Angle(10), Angle(30)};
  CHECK(WeightedCircularMean(a, std::vector<double>{0.5, 0.5}).degrees() == doctest::Approx(20));
  const std::vector<Angle> seam = {Angle(350), Angle(10)};
  CHECK(CircularL1(WeightedCircularMean(seam, std::vector<double>{0.5, 0.5}), Angle(0)) < 1e-9);
  CHECK(WeightedCircularMean(seam, std::vector<double>{1.0, 0.0}).degrees() == doctest::Approx(350));
  CHECK_THROWS_AS((WeightedCircularMean(a, std::vector<double>{1.0})), ConfigError);
}

TEST_CASE("one-hot sender evaluates like a single sample") {
  nnet::Rng rng(10);
  SenderPolicy s = MakeSender(MessageMode::kDiscrete, 5, 8, 0.0, rng);
  ZeroWeights(s.params);
  s.params.heads[0].b << 0, 0, 80, 0, 0;
  const ReceiverPolicy r = MakeReceiver(MessageMode::kDiscrete, 5, 8, rng);
  const GameConfig game{30, 36};
  const Angle target(100);
  const AgentLosses eval = ExpectedActionEval(s, r, target, game);
  const AgentLosses single = Losses(target, 30, ReceiverAction(r, DiscreteToken{2}, 36));
  CHECK(eval.sender == doctest::Approx(single.sender));
  CHECK(eval.receiver == doctest::Approx(single.receiver));
}

TEST_CASE("gaussian evaluation uses the receiver at the mean") {
  nnet::Rng rng(11);
  SenderPolicy s = MakeSender(MessageMode::kGaussianLogVar, 1, 8, 0.0, rng);
  const ReceiverPolicy r = MakeReceiver(MessageMode::kGaussianLogVar, 1, 8, rng);
  const Angle target(200);
  const auto g = std::get<Gaussian>(SenderDistribution(s, target));
  const AgentLosses eval = ExpectedActionEval(s, r, target, GameConfig{60, 36});
  const AgentLosses want = Losses(target, 60, ReceiverAction(r, ContinuousScalar{g.mean}, 36));
  CHECK(eval.sender == doctest::Approx(want.sender));
}

// The expected action over an enumerated distribution agrees with the mean
// of sampled actions.
TEST_CASE("enumerated expected action matches sampling") {
  nnet::Rng rng(12);
  const ReceiverPolicy unused = MakeReceiver(MessageMode::kDiscrete, 4, 4, rng);
  VectorXd p(4);
  p << 0.1, 0.4, 0.3, 0.2;
  for (const std::vector<Angle>& actions :
       {std::vector<Angle>{Angle(20), Angle(60), Angle(100), Angle(150)},
        std::vector<Angle>{Angle(340), Angle(350), Angle(20), Angle(40)}}) {
    const Angle enumerated = ExpectedAction(Categorical{p}, actions, unused, 36);
    const double origin = actions.front().degrees();
    double acc = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      acc += Canonicalize(actions[SampleToken(p, rng)].degrees() - origin);
    }
    CHECK(CircularL1(enumerated, Angle(origin + acc / n)) < 0.5);
  }
}

TEST_CASE("policy snapshots carry the mode") {
  nnet::Rng rng(13);
  const SenderPolicy s = MakeSender(MessageMode::kGaussianVar, 1, 4, 0.1, rng);
  const nlohmann::json doc = ToJson(s);
  CHECK(doc["mode"] == "gaussian_var");
  CHECK(doc.contains("layers"));
  CHECK(ToJson(MakeReceiver(MessageMode::kDiscrete, 3, 4, rng))["mode"] == "discrete");
}

}  // namespace
}  // namespace ecw::circle
