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

#include "ecw/circle/env.h"

#include <cmath>
#include <sstream>

#include "ecw/errors.h"

namespace ecw::circle {

std::string ToString(const Message& message) {
  if (const auto* token = std::get_if<DiscreteToken>(&message)) {
    return std::to_string(token->index);
  }
  std::ostringstream out;
  out.precision(17);
  out << std::get<ContinuousScalar>(message).value;
  return out.str();
}

double Canonicalize(double degrees) {
  double r = std::fmod(degrees, kFullTurnDeg);
  if (r < 0.0) r += kFullTurnDeg;
  // -tiny + 360 rounds to 360.
  if (r >= kFullTurnDeg) r = 0.0;
  return r;
}

void GameConfig::Validate() const {
  if (!(bias_deg >= 0.0 && bias_deg <= 180.0)) {
    throw ConfigError("bias must lie in [0, 180] degrees");
  }
  if (!(circumference > 0.0)) throw ConfigError("circumference must be > 0");
}

double CircularL1(Angle target, Angle action) {
  const double d = std::abs(target.degrees() - action.degrees());
  return std::min(d, kFullTurnDeg - d);
}

double SignedOffset(Angle target, Angle action) {
  double d = action.degrees() - target.degrees();
  if (d >= 180.0) d -= kFullTurnDeg;
  if (d < -180.0) d += kFullTurnDeg;
  return d;
}

double CircularL1Subgradient(Angle target, Angle action) {
  const double d = SignedOffset(target, action);
  if (d == 0.0 || d == -180.0) return 0.0;
  return d > 0.0 ? 1.0 : -1.0;
}

Angle ReceiverTarget(Angle sender_target, double bias_deg) {
  return sender_target.Rotated(bias_deg);
}

AgentLosses Losses(Angle sender_target, double bias_deg, Angle action) {
  return {CircularL1(sender_target, action),
          CircularL1(ReceiverTarget(sender_target, bias_deg), action)};
}

Angle SampleTarget(nnet::Rng& rng) {
  return Angle(rng.Uniform() * kFullTurnDeg);
}

double NonCommBaseline() { return 90.0; }

Angle L2FairAction(Angle sender_target, double bias_deg) {
  if (!(bias_deg >= 0.0 && bias_deg <= 180.0)) {
    throw ConfigError("bias must lie in [0, 180] degrees");
  }
  return sender_target.Rotated(bias_deg / 2.0);
}

double ConstantSumCheck(Angle sender_target, Angle action) {
  const AgentLosses l = Losses(sender_target, 180.0, action);
  return l.sender + l.receiver;
}

std::string GameSampleCsvHeader() { return "ts,tr,b,msg,action,ls,lr"; }

std::string ToCsvRow(const GameSample& sample) {
  std::ostringstream out;
  out.precision(17);
  out << sample.sender_target.degrees() << ',' << sample.receiver_target.degrees()
      << ',' << sample.bias_deg << ',' << ToString(sample.message) << ','
      << sample.action.degrees() << ',' << sample.loss_sender << ','
      << sample.loss_receiver;
  return out.str();
}

}  // namespace ecw::circle
