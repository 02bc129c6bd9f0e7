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

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "ecw/errors.h"
#include "ecw/sweep/sweep.h"
#include "ecw/util/io.h"

namespace ecw::sweep {
namespace {

namespace fs = std::filesystem;

double Correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

circle::TrainConfig TinyBase(double bias) {
  circle::TrainConfig c;
  c.bias_deg = bias;
  c.epochs = 2;
  c.batches_per_epoch = 5;
  c.batch_size = 8;
  return c;
}

TEST_CASE("drawn configs respect the search space") {
  const SearchSpace space;
  nnet::Rng rng(1);
  const circle::TrainConfig base;
  int below = 0;
  const int n = 10000;
  std::vector<double> s_lr, r_lr, s_h, r_h, s_e, r_e;
  for (int i = 0; i < n; ++i) {
    const circle::TrainConfig c = DrawConfig(space, rng, base);
    for (double lr : {c.sender_lr, c.receiver_lr}) {
      CHECK(lr >= 1e-4);
      CHECK(lr <= 1e-2);
    }
    for (int h : {c.sender_hidden, c.receiver_hidden}) {
      CHECK(h >= 16);
      CHECK(h <= 64);
    }
    for (double e : {c.sender_entropy, c.receiver_entropy}) {
      CHECK(e >= 1e-4);
      CHECK(e <= 1.0);
    }
    CHECK(std::set<int>{64, 128, 256}.count(c.vocab_size) == 1);
    if (c.sender_lr < 1e-3) ++below;
    s_lr.push_back(std::log(c.sender_lr));
    r_lr.push_back(std::log(c.receiver_lr));
    s_h.push_back(c.sender_hidden);
    r_h.push_back(c.receiver_hidden);
    s_e.push_back(std::log(c.sender_entropy));
    r_e.push_back(std::log(c.receiver_entropy));
  }
  CHECK(std::abs(below / static_cast<double>(n) - 0.5) < 0.02);
  CHECK(std::abs(Correlation(s_lr, r_lr)) < 0.05);
  CHECK(std::abs(Correlation(s_h, r_h)) < 0.05);
  CHECK(std::abs(Correlation(s_e, r_e)) < 0.05);
}

TEST_CASE("search space validation") {
  SearchSpace s;
  s.lr_min = 0;
  CHECK_THROWS_AS(s.Validate(), ConfigError);
  s = SearchSpace{};
  s.vocab_choices.clear();
  CHECK_THROWS_AS(s.Validate(), ConfigError);
  CHECK_THROWS_AS(ParseSelector("l3"), ConfigError);
  CHECK(ParseSelector("l2_score") == Selector::kL2Score);
}

TrialResult Synthetic(int id, double ls, double lr) {
  return AggregateTrial(id, circle::TrainConfig{}, {SeedOutcome{0, false, "", ls, lr}});
}

TEST_CASE("l1 ties even and uneven splits while l2 prefers the even one") {
  const std::vector<TrialResult> trials = {Synthetic(0, 10, 50), Synthetic(1, 30, 30)};
  CHECK(trials[0].l1_sum == trials[1].l1_sum);
  CHECK(RankTrials(trials, Selector::kL1Sum) == std::vector<int>{0, 1});
  CHECK(RankTrials(trials, Selector::kL2Score) == std::vector<int>{1, 0});
}

TEST_CASE("ranking skips failed trials and breaks ties by id") {
  std::vector<TrialResult> trials = {Synthetic(0, 20, 20), Synthetic(1, 5, 5),
                                     Synthetic(2, 20, 20)};
  trials.push_back(AggregateTrial(3, {}, {SeedOutcome{0, true, "nan", 0, 0}}));
  CHECK(trials[3].failed);
  CHECK(RankTrials(trials, Selector::kL1Sum) == std::vector<int>{1, 0, 2});
}

TEST_CASE("seed means are exact arithmetic means") {
  std::vector<SeedOutcome> seeds;
  double sum_s = 0, sum_r = 0;
  nnet::Rng rng(2);
  for (int k = 0; k < 5; ++k) {
    const double ls = rng.Uniform(0, 180), lr = rng.Uniform(0, 180);
    sum_s += ls;
    sum_r += lr;
    seeds.push_back({static_cast<std::uint64_t>(k), false, "", ls, lr});
  }
  const TrialResult t = AggregateTrial(0, {}, seeds);
  CHECK(std::abs(t.mean_ls - sum_s / 5) < 1e-12);
  CHECK(std::abs(t.mean_lr - sum_r / 5) < 1e-12);
  CHECK(t.l2_score == doctest::Approx(t.mean_ls * t.mean_ls + t.mean_lr * t.mean_lr));
}

TEST_CASE("trial seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (int t = 0; t < 100; ++t) {
    for (int r = 0; r < 5; ++r) seen.insert(TrialSeed(7, t, r));
  }
  CHECK(seen.size() == 500);
}

TEST_CASE("budget of one makes that trial best") {
  SweepOptions o;
  o.budget = 1;
  o.seeds = 1;
  o.threads = 1;
  for (Selector s : {Selector::kL1Sum, Selector::kL2Score}) {
    o.selector = s;
    const SweepResult r = RunSweep(SearchSpace{}, TinyBase(30), o);
    REQUIRE(r.Best() != nullptr);
    CHECK(r.Best()->config_id == 0);
  }
  o.budget = 0;
  CHECK_THROWS_AS((RunSweep(SearchSpace{}, TinyBase(30), o)), ConfigError);
}

TEST_CASE("sweeps are deterministic across thread counts") {
  SweepOptions o;
  o.budget = 3;
  o.seeds = 2;
  o.master_seed = 5;
  o.threads = 1;
  const SweepResult a = RunSweep(SearchSpace{}, TinyBase(60), o);
  o.threads = 3;
  const SweepResult b = RunSweep(SearchSpace{}, TinyBase(60), o);
  CHECK(a.ranking == b.ranking);
  CHECK(TrialsCsv(a.trials) == TrialsCsv(b.trials));
}

TEST_CASE("bias curve") {
  SweepOptions o;
  o.budget = 2;
  o.seeds = 1;
  o.threads = 1;
  std::map<double, SweepResult> by_bias;
  by_bias[0] = RunSweep(SearchSpace{}, TinyBase(0), o);
  by_bias[180] = RunSweep(SearchSpace{}, TinyBase(180), o);
  SweepResult empty;
  empty.bias_deg = 90;
  by_bias[90] = empty;
  const std::vector<BiasCurveRow> rows = BiasCurve(by_bias);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].bias_deg == 180);
  CHECK(std::abs(rows[1].best_l1_sum - 180.0) < 1e-9);
  const util::CsvTable t = util::CsvTable::Parse(BiasCurveCsv(rows));
  CHECK(t.rows() == 2);
}

TEST_CASE("sweep directory round trip") {
  const fs::path dir = fs::temp_directory_path() / "ecw_sweep_roundtrip";
  fs::remove_all(dir);
  SweepOptions o;
  o.budget = 3;
  o.seeds = 2;
  o.threads = 1;
  const SweepResult r = RunSweep(SearchSpace{}, TinyBase(120), o);
  WriteSweepDir(dir, r);
  CHECK(fs::exists(dir / "best.json"));
  CHECK(fs::exists(dir / "scatter_120.csv"));
  const SweepResult back = ReadSweepDir(dir);
  CHECK(back.ranking == r.ranking);
  REQUIRE(back.trials.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.trials[i].mean_ls == r.trials[i].mean_ls);
    CHECK(back.trials[i].config.sender_lr == r.trials[i].config.sender_lr);
  }
  const util::CsvTable scatter = util::CsvTable::Load(dir / "scatter_120.csv");
  CHECK(scatter.rows() == 3);
  CHECK(scatter.Number(0, "ls") == r.trials[0].mean_ls);
  CHECK_THROWS_AS(WriteSweepDir(dir, r), UsageError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ecw::sweep
