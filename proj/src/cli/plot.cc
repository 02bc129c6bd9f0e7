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

#include "ecw/cli/plot.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "ecw/circle/env.h"
#include "ecw/cli/svg.h"
#include "ecw/errors.h"
#include "ecw/sweep/sweep.h"
#include "ecw/util/io.h"

namespace ecw::cli {

namespace fs = std::filesystem;

ConfidenceBand MeanBand(const std::vector<std::vector<double>>& per_seed) {
  ConfidenceBand band;
  if (per_seed.empty()) return band;
  std::size_t n = per_seed.front().size();
  for (const auto& s : per_seed) n = std::min(n, s.size());
  const double k = static_cast<double>(per_seed.size());
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& s : per_seed) mean += s[i] / k;
    double half = 0.0;
    if (per_seed.size() > 1) {
      double ss = 0.0;
      for (const auto& s : per_seed) ss += (s[i] - mean) * (s[i] - mean);
      half = 1.96 * std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    }
    band.mean.push_back(mean);
    band.lo.push_back(mean - half);
    band.hi.push_back(mean + half);
  }
  return band;
}

DirKind DetectDir(const fs::path& dir) {
  if (fs::exists(dir / "bias_curve.csv")) return DirKind::kReport;
  if (fs::exists(dir / "trials.csv")) return DirKind::kSweep;
  if (fs::exists(dir / "metrics.csv")) {
    const util::CsvTable t = util::CsvTable::Load(dir / "metrics.csv");
    return t.HasColumn("reward_a") ? DirKind::kNegotiation : DirKind::kCircleRun;
  }
  throw ConfigError(dir.string() +
                    ": no metrics.csv, trials.csv or bias_curve.csv to plot");
}

namespace {

std::vector<double> Column(const util::CsvTable& t, const char* name,
                           const fs::path& source) {
  if (!t.HasColumn(name)) {
    throw ConfigError(source.string() + " lacks required column '" + name + "'");
  }
  return t.NumberColumn(name);
}

LineSeries BandSeries(const std::string& label, std::vector<double> x,
                      const std::vector<std::vector<double>>& per_seed) {
  ConfidenceBand b = MeanBand(per_seed);
  x.resize(b.mean.size());
  return {label, std::move(x), std::move(b.mean), std::move(b.lo),
          std::move(b.hi)};
}

void Emit(const fs::path& path, const Figure& figure,
          std::vector<fs::path>& written) {
  if (fs::exists(path)) {
    throw UsageError(path.string() + " already exists; refusing to overwrite");
  }
  util::WriteTextFile(path, RenderSvg(figure));
  written.push_back(path);
}

struct CircleGroup {
  std::vector<std::vector<double>> ls, lr;
  std::vector<double> epochs;
};

void PlotSweep(const fs::path& dir, const fs::path& out,
               std::vector<fs::path>& written) {
  const sweep::SweepResult result = sweep::ReadSweepDir(dir);
  ScatterSeries points{"trials (seed mean)", {}, {}};
  for (const auto& p : sweep::ScatterPoints(result)) {
    points.x.push_back(p.loss_sender);
    points.y.push_back(p.loss_receiver);
  }
  Figure f;
  f.title = "Receiver vs sender loss, b = " + sweep::BiasLabel(result.bias_deg);
  f.x_label = "sender loss (deg)";
  f.y_label = "receiver loss (deg)";
  f.scatter.push_back(std::move(points));
  f.refs.push_back({circle::NonCommBaseline(), "non-communication 90", true, false});
  f.refs.push_back({circle::NonCommBaseline(), "", true, true});
  f.x_range = f.y_range = std::make_pair(0.0, 180.0);
  Emit(out / (dir.filename().string() + "_scatter.svg"), f, written);
}

void PlotNegotiation(const fs::path& dir, const fs::path& out,
                     std::vector<fs::path>& written) {
  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() &&
        entry.path().filename().string().rfind("seed_", 0) == 0 &&
        fs::exists(entry.path() / "metrics.csv")) {
      sources.push_back(entry.path() / "metrics.csv");
    }
  }
  std::sort(sources.begin(), sources.end());
  if (sources.empty()) sources.push_back(dir / "metrics.csv");

  std::vector<std::vector<double>> ra, rb, ua, ub;
  std::vector<double> epochs;
  for (const fs::path& src : sources) {
    const util::CsvTable t = util::CsvTable::Load(src);
    const std::vector<double> e = Column(t, "epoch", src);
    if (epochs.empty() || e.size() < epochs.size()) epochs = e;
    ra.push_back(Column(t, "reward_a", src));
    rb.push_back(Column(t, "reward_b", src));
    if (!t.HasColumn("unmask_a") || !t.HasColumn("unmask_b")) {
      throw ConfigError(src.string() + " lacks the unmask_a/unmask_b columns");
    }
    std::vector<double> a, b;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const auto va = t.OptionalNumber(r, "unmask_a");
      const auto vb = t.OptionalNumber(r, "unmask_b");
      if (va && vb) {
        a.push_back(100.0 * *va);
        b.push_back(100.0 * *vb);
      }
    }
    if (!a.empty()) {
      ua.push_back(std::move(a));
      ub.push_back(std::move(b));
    }
  }
  const std::string name = dir.filename().string();
  Figure f;
  f.title = "Normalized reward, " + name;
  f.x_label = "epoch";
  f.y_label = "reward";
  f.lines.push_back(BandSeries("agent A", epochs, ra));
  f.lines.push_back(BandSeries("agent B", epochs, rb));
  f.y_range = std::make_pair(0.0, 1.0);
  Emit(out / (name + "_reward.svg"), f, written);
  if (!ua.empty()) {
    Figure m;
    m.title = "Unmasked messages, " + name;
    m.x_label = "epoch";
    m.y_label = "unmasked (%)";
    m.lines.push_back(BandSeries("agent A", epochs, ua));
    m.lines.push_back(BandSeries("agent B", epochs, ub));
    m.y_range = std::make_pair(0.0, 100.0);
    Emit(out / (name + "_unmask.svg"), m, written);
  }
}

void PlotReport(const fs::path& dir, const fs::path& out,
                std::vector<fs::path>& written) {
  const fs::path src = dir / "bias_curve.csv";
  const util::CsvTable t = util::CsvTable::Load(src);
  Figure f;
  f.title = "Lowest test loss per bias";
  f.x_label = "bias b (deg)";
  f.y_label = "L_s + L_r (deg)";
  f.lines.push_back({"best L1 sum", Column(t, "bias", src),
                     Column(t, "best_l1_sum", src), {}, {}});
  f.refs.push_back({2 * circle::NonCommBaseline(), "non-communication 180", true,
                    false});
  f.y_range = std::make_pair(0.0, 200.0);
  Emit(out / (dir.filename().string() + "_bias_curve.svg"), f, written);
}

}  // namespace

std::vector<fs::path> PlotDirs(const std::vector<fs::path>& dirs,
                               const fs::path& out) {
  if (dirs.empty()) throw UsageError("plot needs at least one directory");
  std::vector<DirKind> kinds;
  for (const fs::path& d : dirs) kinds.push_back(DetectDir(d));
  fs::create_directories(out);

  std::vector<fs::path> written;
  std::map<std::optional<double>, CircleGroup> circle_groups;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const fs::path& d = dirs[i];
    switch (kinds[i]) {
      case DirKind::kCircleRun: {
        std::optional<double> bias;
        if (fs::exists(d / "config.json")) {
          const auto cfg = util::ReadJsonFile(d / "config.json");
          if (cfg.contains("bias")) bias = cfg["bias"].get<double>();
        }
        const fs::path src = d / "metrics.csv";
        const util::CsvTable t = util::CsvTable::Load(src);
        CircleGroup& g = circle_groups[bias];
        const std::vector<double> e = Column(t, "epoch", src);
        if (g.epochs.empty() || e.size() < g.epochs.size()) g.epochs = e;
        g.ls.push_back(Column(t, "eval_ls", src));
        g.lr.push_back(Column(t, "eval_lr", src));
        break;
      }
      case DirKind::kSweep:
        PlotSweep(d, out, written);
        break;
      case DirKind::kNegotiation:
        PlotNegotiation(d, out, written);
        break;
      case DirKind::kReport:
        PlotReport(d, out, written);
        break;
    }
  }
  for (const auto& [bias, g] : circle_groups) {
    Figure f;
    const std::string label = bias ? sweep::BiasLabel(*bias) : "unknown";
    f.title = "Test loss, b = " + label + " (" + std::to_string(g.ls.size()) +
              (g.ls.size() == 1 ? " seed)" : " seeds)");
    f.x_label = "epoch";
    f.y_label = "loss (deg)";
    f.lines.push_back(BandSeries("sender", g.epochs, g.ls));
    f.lines.push_back(BandSeries("receiver", g.epochs, g.lr));
    f.refs.push_back({circle::NonCommBaseline(), "non-communication 90", true,
                      false});
    if (bias) f.refs.push_back({*bias / 2.0, "even split b/2", false, false});
    f.y_range = std::make_pair(0.0, 180.0);
    Emit(out / ("circle_b" + label + ".svg"), f, written);
  }
  return written;
}

}  // namespace ecw::cli
