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

#ifndef ECW_CIRCLE_AGENTS_H_
#define ECW_CIRCLE_AGENTS_H_

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ecw/circle/env.h"
#include "ecw/circle/message.h"
#include "ecw/nnet/net.h"
#include "ecw/nnet/rng.h"

namespace ecw::circle {

enum class MessageMode { kDiscrete, kGaussianVar, kGaussianLogVar };

std::string_view ToString(MessageMode mode);
MessageMode ParseMessageMode(std::string_view name);

inline constexpr char kLogitsHead[] = "logits";
inline constexpr char kMeanHead[] = "mean";
inline constexpr char kSpreadHead[] = "spread";
inline constexpr char kActionHead[] = "action";
// Floor added to softplus in the variance parameterization.
inline constexpr double kSpreadFloor = 1e-4;

struct SenderPolicy {
  nnet::NetSpec spec;
  nnet::NetParams params;
  MessageMode mode = MessageMode::kDiscrete;
  int vocab_size = 1;
  double entropy_coeff = 0.0;
};

// Deterministic: the action is a function of the message.
struct ReceiverPolicy {
  nnet::NetSpec spec;
  nnet::NetParams params;
  MessageMode mode = MessageMode::kDiscrete;
  int vocab_size = 1;
};

// Two hidden layers of the given width. Discrete senders have one logits
// head of size vocab_size; Gaussian senders have scalar mean and spread
// heads.
SenderPolicy MakeSender(MessageMode mode, int vocab_size, int hidden,
                        double entropy_coeff, nnet::Rng& rng);
ReceiverPolicy MakeReceiver(MessageMode mode, int vocab_size, int hidden,
                            nnet::Rng& rng);

// (sin, cos) of the target.
Eigen::Vector2d EncodeTarget(Angle target);
// One-hot for tokens, the raw value for scalars.
Eigen::VectorXd EncodeMessage(const Message& message, int vocab_size);

struct Categorical {
  Eigen::VectorXd probs;
};

struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
};

using MessageDistribution = std::variant<Categorical, Gaussian>;

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits);
double CategoricalEntropy(const Eigen::VectorXd& probs);
// d entropy / d logits = -p * (log p + H).
Eigen::VectorXd CategoricalEntropyGradient(const Eigen::VectorXd& probs);
double GaussianEntropy(double stddev);
double GaussianLogDensity(double x, double mean, double stddev);

// Standard deviation from the raw spread head, and its derivative.
double SpreadFromRaw(MessageMode mode, double raw);
double SpreadDerivative(MessageMode mode, double raw);

// Builds the distribution from raw head outputs (one sample).
MessageDistribution DistributionFromHeads(MessageMode mode,
                                          const Eigen::VectorXd& logits_or_mean,
                                          double raw_spread);
MessageDistribution SenderDistribution(const SenderPolicy& sender,
                                       Angle target);

struct MessageDraw {
  Message message;
  double log_prob = 0.0;
  double entropy = 0.0;
};

MessageDraw SampleMessage(const MessageDistribution& dist, nnet::Rng& rng);
// Inverse-CDF draw of a token.
int SampleToken(const Eigen::Ref<const Eigen::VectorXd>& probs,
                nnet::Rng& rng);

// Raw scalar in internal units, wrapped onto the circle.
Angle WrapUnits(double raw, double circumference);
Angle ReceiverAction(const ReceiverPolicy& receiver, const Message& message,
                     double circumference);
// Actions the receiver takes for every token, in token order.
std::vector<Angle> TokenActions(const ReceiverPolicy& receiver,
                                double circumference);

// Probability-weighted mean of angles. When the support fits in an open
// half-circle the angles are unwrapped relative to that arc and averaged
// arithmetically; otherwise the direction of the weighted resultant vector
// is returned.
Angle WeightedCircularMean(std::span<const Angle> angles,
                           std::span<const double> weights);

// The action the pair produces "in expectation" for one target.
Angle ExpectedAction(const MessageDistribution& dist,
                     std::span<const Angle> token_actions,
                     const ReceiverPolicy& receiver, double circumference);

AgentLosses ExpectedActionEval(const SenderPolicy& sender,
                               const ReceiverPolicy& receiver, Angle target,
                               const GameConfig& game);

nlohmann::json ToJson(const SenderPolicy& sender);
nlohmann::json ToJson(const ReceiverPolicy& receiver);

}  // namespace ecw::circle

#endif  // ECW_CIRCLE_AGENTS_H_
