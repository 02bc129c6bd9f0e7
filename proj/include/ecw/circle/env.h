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

// The circular biased sender-receiver game. Angles are reported in degrees;
// the training code works on a circle of circumference GameConfig::
// circumference (36 by default), converting at this boundary.

#ifndef ECW_CIRCLE_ENV_H_
#define ECW_CIRCLE_ENV_H_

#include <string>

#include "ecw/circle/message.h"
#include "ecw/nnet/rng.h"

namespace ecw::circle {

inline constexpr double kFullTurnDeg = 360.0;
inline constexpr double kDefaultCircumference = 36.0;

// Reduces any finite angle to [0, 360).
double Canonicalize(double degrees);

class Angle {
 public:
  Angle() = default;
  explicit Angle(double degrees) : degrees_(Canonicalize(degrees)) {}

  static Angle FromUnits(double units, double circumference) {
    return Angle(units * kFullTurnDeg / circumference);
  }

  double degrees() const { return degrees_; }
  double ToUnits(double circumference) const {
    return degrees_ * circumference / kFullTurnDeg;
  }

  Angle Rotated(double degrees) const { return Angle(degrees_ + degrees); }

  friend bool operator==(Angle a, Angle b) { return a.degrees_ == b.degrees_; }

 private:
  double degrees_ = 0.0;
};

struct GameConfig {
  double bias_deg = 0.0;
  double circumference = kDefaultCircumference;

  void Validate() const;
  // Multiply a loss in internal units by this to get degrees.
  double DegreesPerUnit() const { return kFullTurnDeg / circumference; }
};

// min(|t - a|, 360 - |t - a|), in [0, 180].
double CircularL1(Angle target, Angle action);

// Signed shortest displacement from target to action, in [-180, 180).
double SignedOffset(Angle target, Angle action);

// d CircularL1 / d action: +-1 by the active branch, 0 at the two kinks.
double CircularL1Subgradient(Angle target, Angle action);

struct AgentLosses {
  double sender = 0.0;
  double receiver = 0.0;
};

Angle ReceiverTarget(Angle sender_target, double bias_deg);
AgentLosses Losses(Angle sender_target, double bias_deg, Angle action);

Angle SampleTarget(nnet::Rng& rng);

// Expected per-agent loss when the action ignores the target: 90 degrees.
double NonCommBaseline();

// Minimizer of L_s^2 + L_r^2: the midpoint T_s + b/2 of the shorter arc.
Angle L2FairAction(Angle sender_target, double bias_deg);

// L_s + L_r at bias 180; identically 180.
double ConstantSumCheck(Angle sender_target, Angle action);

struct GameSample {
  Angle sender_target;
  Angle receiver_target;
  double bias_deg = 0.0;
  Message message;
  Angle action;
  double loss_sender = 0.0;
  double loss_receiver = 0.0;
};

std::string GameSampleCsvHeader();
std::string ToCsvRow(const GameSample& sample);

}  // namespace ecw::circle

#endif  // ECW_CIRCLE_ENV_H_
