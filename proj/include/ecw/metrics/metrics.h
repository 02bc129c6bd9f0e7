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

// Information transfer and communication-versus-manipulation measures over
// final per-agent losses (degrees).

#ifndef ECW_METRICS_METRICS_H_
#define ECW_METRICS_METRICS_H_

#include <span>
#include <string>
#include <string_view>

namespace ecw::metrics {

enum class OutcomeClass {
  kCommunication,
  kManipulationByReceiver,
  kManipulationBySender,
  kNonCommunication,
};

std::string_view ToString(OutcomeClass outcome);

inline constexpr double kDefaultMargin = 2.0;

// Both agents below the 90-degree baseline by more than the margin is
// communication; one clearly below and the other clearly above is
// manipulation by the one that benefits; anything else is
// non-communication.
OutcomeClass Classify(double loss_sender, double loss_receiver,
                      double margin = kDefaultMargin);

// L_s^2 + L_r^2. Among equal sums it prefers the even split.
double L2Score(double loss_sender, double loss_receiver);

double L1Sum(double loss_sender, double loss_receiver);

// 90 - min(L_s, L_r): positive means at least one agent beats the
// non-communication baseline.
double InformationTransfer(double loss_sender, double loss_receiver);

// 180 - (L_s + L_r): the joint reading, positive when the pair beats the
// joint non-communication loss.
double JointInformationTransfer(double loss_sender, double loss_receiver);

// The part of the total loss that both agents share: 180 - b.
double CommonInterestLoss(double bias_deg);

struct ScatterPoint {
  int config_id = 0;
  double loss_sender = 0.0;
  double loss_receiver = 0.0;
  double bias_deg = 0.0;
  int n_seeds = 0;
};

inline constexpr char kScatterHeader[] = "config_id,ls,lr,bias,n_seeds";

// One row per point, sorted by config id, preceded by a comment line
// carrying the non-communication baseline.
std::string ScatterCsv(std::span<const ScatterPoint> points);

}  // namespace ecw::metrics

#endif  // ECW_METRICS_METRICS_H_
