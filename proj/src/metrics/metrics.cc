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

#include "ecw/metrics/metrics.h"

#include <algorithm>
#include <sstream>
#include <vector>

#include "ecw/circle/env.h"
#include "ecw/util/io.h"

namespace ecw::metrics {

std::string_view ToString(OutcomeClass outcome) {
  switch (outcome) {
    case OutcomeClass::kCommunication:
      return "communication";
    case OutcomeClass::kManipulationByReceiver:
      return "manipulation_by_receiver";
    case OutcomeClass::kManipulationBySender:
      return "manipulation_by_sender";
    case OutcomeClass::kNonCommunication:
      return "non_communication";
  }
  return "non_communication";
}

OutcomeClass Classify(double loss_sender, double loss_receiver,
                      double margin) {
  const double baseline = circle::NonCommBaseline();
  const bool sender_gains = loss_sender < baseline - margin;
  const bool receiver_gains = loss_receiver < baseline - margin;
  const bool sender_loses = loss_sender > baseline + margin;
  const bool receiver_loses = loss_receiver > baseline + margin;
  if (sender_gains && receiver_gains) return OutcomeClass::kCommunication;
  if (receiver_gains && sender_loses) {
    return OutcomeClass::kManipulationByReceiver;
  }
  if (sender_gains && receiver_loses) return OutcomeClass::kManipulationBySender;
  return OutcomeClass::kNonCommunication;
}

double L2Score(double loss_sender, double loss_receiver) {
  return loss_sender * loss_sender + loss_receiver * loss_receiver;
}

double L1Sum(double loss_sender, double loss_receiver) {
  return loss_sender + loss_receiver;
}

double InformationTransfer(double loss_sender, double loss_receiver) {
  return circle::NonCommBaseline() - std::min(loss_sender, loss_receiver);
}

double JointInformationTransfer(double loss_sender, double loss_receiver) {
  return 2.0 * circle::NonCommBaseline() - (loss_sender + loss_receiver);
}

double CommonInterestLoss(double bias_deg) { return 180.0 - bias_deg; }

std::string ScatterCsv(std::span<const ScatterPoint> points) {
  std::vector<ScatterPoint> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScatterPoint& a, const ScatterPoint& b) {
                     return a.config_id < b.config_id;
                   });
  std::ostringstream out;
  out << "# non_comm_baseline=" << circle::NonCommBaseline() << '\n';
  out << kScatterHeader << '\n';
  for (const ScatterPoint& p : sorted) {
    out << p.config_id << ',' << util::FormatDouble(p.loss_sender) << ','
        << util::FormatDouble(p.loss_receiver) << ','
        << util::FormatDouble(p.bias_deg) << ',' << p.n_seeds << '\n';
  }
  return out.str();
}

}  // namespace ecw::metrics
