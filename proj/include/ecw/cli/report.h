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

// Cross-sweep reporting: the best-score-per-bias table, per-bias
// classification counts and information-transfer numbers, and the scatter
// exports, all rebuilt from persisted sweep directories.

#ifndef ECW_CLI_REPORT_H_
#define ECW_CLI_REPORT_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecw/sweep/sweep.h"

namespace ecw::cli {

struct Report {
  std::vector<sweep::BiasCurveRow> curve;
  nlohmann::json summary;
  std::map<double, std::string> scatter_csv;
};

// Throws ConfigError if two directories hold sweeps for the same bias.
Report BuildReport(const std::vector<std::filesystem::path>& sweep_dirs);

// bias_curve.csv, summary.json and scatter_<b>.csv under out.
void WriteReport(const std::filesystem::path& out, const Report& report);

}  // namespace ecw::cli

#endif  // ECW_CLI_REPORT_H_
