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

// A small deterministic SVG line/scatter chart writer. Output depends only
// on the figure contents, so identical inputs give identical bytes.

#ifndef ECW_CLI_SVG_H_
#define ECW_CLI_SVG_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ecw::cli {

struct LineSeries {
  std::string label;
  std::vector<double> x, y;
  // Shaded band drawn under the line; same length as x when present.
  std::vector<double> lo, hi;
};

struct ScatterSeries {
  std::string label;
  std::vector<double> x, y;
};

struct RefLine {
  double value = 0.0;
  std::string label;
  bool dark = true;
  bool vertical = false;
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<LineSeries> lines;
  std::vector<ScatterSeries> scatter;
  std::vector<RefLine> refs;
  std::optional<std::pair<double, double>> x_range, y_range;
};

std::string RenderSvg(const Figure& figure);

}  // namespace ecw::cli

#endif  // ECW_CLI_SVG_H_
