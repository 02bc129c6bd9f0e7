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

#include "ecw/circle/agents.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ecw/errors.h"
#include "ecw/nnet/snapshot.h"

namespace ecw::circle {

namespace {

// Tokens lighter than this do not count towards the support of the
// expected-action mean.
constexpr double kSupportEps = 1e-12;

constexpr double kDegToRad = std::numbers::pi / 180.0;

nnet::NetSpec MlpSpec(int input_dim, int hidden,
                      std::vector<nnet::HeadSpec> heads) {
  nnet::NetSpec spec;
  spec.input_dim = input_dim;
  spec.hidden_dims = {hidden, hidden};
  spec.heads = std::move(heads);
  spec.Validate();
  return spec;
}

double Softplus(double x) {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string_view ToString(MessageMode mode) {
  switch (mode) {
    case MessageMode::kDiscrete:
      return "discrete";
    case MessageMode::kGaussianVar:
      return "gaussian_var";
    case MessageMode::kGaussianLogVar:
      return "gaussian_logvar";
  }
  return "discrete";
}

MessageMode ParseMessageMode(std::string_view name) {
  if (name == "discrete") return MessageMode::kDiscrete;
  if (name == "gaussian_var") return MessageMode::kGaussianVar;
  if (name == "gaussian_logvar") return MessageMode::kGaussianLogVar;
  throw ConfigError("unknown message mode '" + std::string(name) + "'");
}

SenderPolicy MakeSender(MessageMode mode, int vocab_size, int hidden,
                        double entropy_coeff, nnet::Rng& rng) {
  if (vocab_size < 1) throw ConfigError("vocabulary size must be >= 1");
  if (entropy_coeff < 0.0) throw ConfigError("entropy coefficient must be >= 0");
  SenderPolicy sender;
  sender.mode = mode;
  sender.vocab_size = vocab_size;
  sender.entropy_coeff = entropy_coeff;
  if (mode == MessageMode::kDiscrete) {
    sender.spec = MlpSpec(2, hidden, {{kLogitsHead, vocab_size}});
  } else {
    sender.spec = MlpSpec(2, hidden, {{kMeanHead, 1}, {kSpreadHead, 1}});
  }
  sender.params = nnet::Init(sender.spec, rng);
  return sender;
}

ReceiverPolicy MakeReceiver(MessageMode mode, int vocab_size, int hidden,
                            nnet::Rng& rng) {
  if (vocab_size < 1) throw ConfigError("vocabulary size must be >= 1");
  ReceiverPolicy receiver;
  receiver.mode = mode;
  receiver.vocab_size = vocab_size;
  const int input_dim = mode == MessageMode::kDiscrete ? vocab_size : 1;
  receiver.spec = MlpSpec(input_dim, hidden, {{kActionHead, 1}});
  receiver.params = nnet::Init(receiver.spec, rng);
  return receiver;
}

Eigen::Vector2d EncodeTarget(Angle target) {
  const double rad = target.degrees() * kDegToRad;
  return {std::sin(rad), std::cos(rad)};
}

Eigen::VectorXd EncodeMessage(const Message& message, int vocab_size) {
  if (const auto* token = std::get_if<DiscreteToken>(&message)) {
    if (token->index < 0 || token->index >= vocab_size) {
      throw ConfigError("token " + std::to_string(token->index) +
                        " outside vocabulary of size " +
                        std::to_string(vocab_size));
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(vocab_size);
    v(token->index) = 1.0;
    return v;
  }
  const double value = std::get<ContinuousScalar>(message).value;
  if (!std::isfinite(value)) throw ConfigError("non-finite scalar message");
  return Eigen::VectorXd::Constant(1, value);
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - top).exp();
  return p / p.sum();
}

double CategoricalEntropy(const Eigen::VectorXd& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) > 0.0) h -= probs(i) * std::log(probs(i));
  }
  return h;
}

Eigen::VectorXd CategoricalEntropyGradient(const Eigen::VectorXd& probs) {
  const double h = CategoricalEntropy(probs);
  Eigen::VectorXd g(probs.size());
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    g(i) = probs(i) > 0.0 ? -probs(i) * (std::log(probs(i)) + h) : 0.0;
  }
  return g;
}

double GaussianEntropy(double stddev) {
  // stddev * stddev overflows long before stddev does.
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e) +
         std::log(stddev);
}

double GaussianLogDensity(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return -0.5 * z * z - std::log(stddev) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

double SpreadFromRaw(MessageMode mode, double raw) {
  switch (mode) {
    case MessageMode::kGaussianVar:
      return Softplus(raw) + kSpreadFloor;
    case MessageMode::kGaussianLogVar:
      return std::exp(0.5 * raw);
    case MessageMode::kDiscrete:
      break;
  }
  throw UsageError("discrete senders have no spread head");
}

double SpreadDerivative(MessageMode mode, double raw) {
  switch (mode) {
    case MessageMode::kGaussianVar:
      return Sigmoid(raw);
    case MessageMode::kGaussianLogVar:
      return 0.5 * std::exp(0.5 * raw);
    case MessageMode::kDiscrete:
      break;
  }
  throw UsageError("discrete senders have no spread head");
}

MessageDistribution DistributionFromHeads(MessageMode mode,
                                          const Eigen::VectorXd& logits_or_mean,
                                          double raw_spread) {
  if (!logits_or_mean.allFinite() || !std::isfinite(raw_spread)) {
    throw DivergenceError("sender network produced a non-finite output");
  }
  if (mode == MessageMode::kDiscrete) return Categorical{Softmax(logits_or_mean)};
  return Gaussian{logits_or_mean(0), SpreadFromRaw(mode, raw_spread)};
}

MessageDistribution SenderDistribution(const SenderPolicy& sender,
                                       Angle target) {
  const nnet::ForwardResult out = nnet::Forward(
      sender.params, sender.spec, Eigen::VectorXd(EncodeTarget(target)));
  if (sender.mode == MessageMode::kDiscrete) {
    return DistributionFromHeads(sender.mode, out.heads.at(kLogitsHead).col(0),
                                 0.0);
  }
  return DistributionFromHeads(sender.mode, out.heads.at(kMeanHead).col(0),
                               out.heads.at(kSpreadHead)(0, 0));
}

int SampleToken(const Eigen::Ref<const Eigen::VectorXd>& probs,
                nnet::Rng& rng) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs(i);
    if (u < acc) return static_cast<int>(i);
  }
  // Round-off left u above the running total: take the last token with mass.
  for (Eigen::Index i = probs.size(); i-- > 0;) {
    if (probs(i) > 0.0) return static_cast<int>(i);
  }
  return 0;
}

MessageDraw SampleMessage(const MessageDistribution& dist, nnet::Rng& rng) {
  if (const auto* cat = std::get_if<Categorical>(&dist)) {
    const int token = SampleToken(cat->probs, rng);
    return {DiscreteToken{token}, std::log(cat->probs(token)),
            CategoricalEntropy(cat->probs)};
  }
  const auto& g = std::get<Gaussian>(dist);
  const double x = g.mean + g.stddev * rng.Normal();
  return {ContinuousScalar{x}, GaussianLogDensity(x, g.mean, g.stddev),
          GaussianEntropy(g.stddev)};
}

Angle WrapUnits(double raw, double circumference) {
  return Angle::FromUnits(raw, circumference);
}

Angle ReceiverAction(const ReceiverPolicy& receiver, const Message& message,
                     double circumference) {
  const nnet::ForwardResult out =
      nnet::Forward(receiver.params, receiver.spec,
                    EncodeMessage(message, receiver.vocab_size));
  return WrapUnits(out.heads.at(kActionHead)(0, 0), circumference);
}

std::vector<Angle> TokenActions(const ReceiverPolicy& receiver,
                                double circumference) {
  if (receiver.mode != MessageMode::kDiscrete) {
    throw UsageError("token actions are defined for discrete receivers only");
  }
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(receiver.vocab_size, receiver.vocab_size);
  const nnet::ForwardResult out =
      nnet::Forward(receiver.params, receiver.spec, eye);
  const Eigen::MatrixXd& raw = out.heads.at(kActionHead);
  std::vector<Angle> actions;
  actions.reserve(receiver.vocab_size);
  for (Eigen::Index t = 0; t < raw.cols(); ++t) {
    actions.push_back(WrapUnits(raw(0, t), circumference));
  }
  return actions;
}

Angle WeightedCircularMean(std::span<const Angle> angles,
                           std::span<const double> weights) {
  if (angles.size() != weights.size()) {
    throw ConfigError("angles and weights differ in length");
  }
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (weights[i] > kSupportEps) support.push_back(i);
  }
  if (support.empty()) throw ConfigError("circular mean of zero total weight");

  std::vector<double> sorted;
  for (std::size_t i : support) sorted.push_back(angles[i].degrees());
  std::sort(sorted.begin(), sorted.end());
  double largest_gap = sorted.front() + kFullTurnDeg - sorted.back();
  double arc_start = sorted.front();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double gap = sorted[i] - sorted[i - 1];
    if (gap > largest_gap) {
      largest_gap = gap;
      arc_start = sorted[i];
    }
  }

  double total = 0.0;
  for (std::size_t i : support) total += weights[i];
  if (kFullTurnDeg - largest_gap < 180.0) {
    double acc = 0.0;
    for (std::size_t i : support) {
      acc += weights[i] * Canonicalize(angles[i].degrees() - arc_start);
    }
    return Angle(arc_start + acc / total);
  }
  double s = 0.0;
  double c = 0.0;
  for (std::size_t i : support) {
    s += weights[i] * std::sin(angles[i].degrees() * kDegToRad);
    c += weights[i] * std::cos(angles[i].degrees() * kDegToRad);
  }
  return Angle(std::atan2(s, c) / kDegToRad);
}

Angle ExpectedAction(const MessageDistribution& dist,
                     std::span<const Angle> token_actions,
                     const ReceiverPolicy& receiver, double circumference) {
  if (const auto* cat = std::get_if<Categorical>(&dist)) {
    std::vector<double> weights(cat->probs.data(),
                                cat->probs.data() + cat->probs.size());
    return WeightedCircularMean(token_actions, weights);
  }
  return ReceiverAction(receiver, ContinuousScalar{std::get<Gaussian>(dist).mean},
                        circumference);
}

AgentLosses ExpectedActionEval(const SenderPolicy& sender,
                               const ReceiverPolicy& receiver, Angle target,
                               const GameConfig& game) {
  const MessageDistribution dist = SenderDistribution(sender, target);
  std::vector<Angle> token_actions;
  if (receiver.mode == MessageMode::kDiscrete) {
    token_actions = TokenActions(receiver, game.circumference);
  }
  const Angle action =
      ExpectedAction(dist, token_actions, receiver, game.circumference);
  return Losses(target, game.bias_deg, action);
}

nlohmann::json ToJson(const SenderPolicy& sender) {
  nlohmann::json doc = nnet::ToJson(sender.params, sender.spec);
  doc["mode"] = ToString(sender.mode);
  doc["vocab_size"] = sender.vocab_size;
  doc["entropy_coeff"] = sender.entropy_coeff;
  return doc;
}

nlohmann::json ToJson(const ReceiverPolicy& receiver) {
  nlohmann::json doc = nnet::ToJson(receiver.params, receiver.spec);
  doc["mode"] = ToString(receiver.mode);
  doc["vocab_size"] = receiver.vocab_size;
  return doc;
}

}  // namespace ecw::circle
