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

// Figure emission from persisted run, sweep, negotiation and report
// directories. Curves show the seed mean with a 95% normal band.

#ifndef ECW_CLI_PLOT_H_
#define ECW_CLI_PLOT_H_

#include <filesystem>
#include <vector>

namespace ecw::cli {

struct ConfidenceBand {
  std::vector<double> mean, lo, hi;
};

// per_seed[k][i] is seed k at point i; series are truncated to the
// shortest. Band is mean +- 1.96 * sd / sqrt(n) with the sample sd; it
// collapses to the mean for a single seed.
ConfidenceBand MeanBand(const std::vector<std::vector<double>>& per_seed);

enum class DirKind { kCircleRun, kSweep, kNegotiation, kReport };

// Throws ConfigError when the directory holds none of the known outputs.
DirKind DetectDir(const std::filesystem::path& dir);

// Writes one SVG per figure into out and returns the paths. Circle run
// directories with the same bias are treated as seeds of one figure.
// Refuses to overwrite existing files.
std::vector<std::filesystem::path> PlotDirs(
    const std::vector<std::filesystem::path>& dirs,
    const std::filesystem::path& out);

}  // namespace ecw::cli

#endif  // ECW_CLI_PLOT_H_
