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

#include "ecw/cli/report.h"

#include "ecw/errors.h"
#include "ecw/metrics/metrics.h"
#include "ecw/util/io.h"

namespace ecw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json TrialSummary(const sweep::TrialResult& t, double bias) {
  return {{"config_id", t.config_id},
          {"ls", t.mean_ls},
          {"lr", t.mean_lr},
          {"l1_sum", t.l1_sum},
          {"l2_score", t.l2_score},
          {"outcome", metrics::ToString(t.outcome)},
          {"information_transfer",
           metrics::InformationTransfer(t.mean_ls, t.mean_lr)},
          {"joint_information_transfer",
           metrics::JointInformationTransfer(t.mean_ls, t.mean_lr)},
          {"common_interest_loss", metrics::CommonInterestLoss(bias)}};
}

}  // namespace

Report BuildReport(const std::vector<fs::path>& sweep_dirs) {
  if (sweep_dirs.empty()) throw UsageError("report needs at least one sweep dir");
  std::map<double, sweep::SweepResult> by_bias;
  std::map<double, fs::path> origin;
  for (const fs::path& dir : sweep_dirs) {
    sweep::SweepResult r = sweep::ReadSweepDir(dir);
    const double bias = r.bias_deg;
    if (by_bias.count(bias) > 0) {
      throw ConfigError("sweeps " + origin[bias].string() + " and " +
                        dir.string() + " both cover bias " +
                        sweep::BiasLabel(bias));
    }
    origin[bias] = dir;
    by_bias.emplace(bias, std::move(r));
  }

  Report report;
  report.curve = sweep::BiasCurve(by_bias);
  json biases = json::array();
  for (const auto& [bias, result] : by_bias) {
    std::map<std::string, int> counts;
    for (auto c : {metrics::OutcomeClass::kCommunication,
                   metrics::OutcomeClass::kManipulationByReceiver,
                   metrics::OutcomeClass::kManipulationBySender,
                   metrics::OutcomeClass::kNonCommunication}) {
      counts[std::string(metrics::ToString(c))] = 0;
    }
    for (const sweep::TrialResult& t : result.trials) {
      if (!t.failed) ++counts[std::string(metrics::ToString(t.outcome))];
    }
    json entry = {{"bias", bias},
                  {"source", origin[bias].string()},
                  {"n_trials", result.trials.size()},
                  {"n_failed", result.n_failed},
                  {"classification", counts}};
    for (auto s : {sweep::Selector::kL1Sum, sweep::Selector::kL2Score}) {
      const std::vector<int> order = sweep::RankTrials(result.trials, s);
      entry[std::string("best_by_") + std::string(sweep::ToString(s))] =
          order.empty() ? json()
                        : TrialSummary(result.trials[order.front()], bias);
    }
    biases.push_back(entry);
    report.scatter_csv[bias] =
        metrics::ScatterCsv(sweep::ScatterPoints(result));
  }
  report.summary = {{"margin", metrics::kDefaultMargin},
                    {"non_comm_baseline", 90.0},
                    {"biases", biases}};
  return report;
}

void WriteReport(const fs::path& out, const Report& report) {
  util::PrepareOutputDir(out, {"bias_curve.csv", "summary.json"});
  util::WriteTextFile(out / "bias_curve.csv", sweep::BiasCurveCsv(report.curve));
  util::WriteJsonFile(out / "summary.json", report.summary);
  for (const auto& [bias, csv] : report.scatter_csv) {
    util::WriteTextFile(out / ("scatter_" + sweep::BiasLabel(bias) + ".csv"), csv);
  }
}

}  // namespace ecw::cli
