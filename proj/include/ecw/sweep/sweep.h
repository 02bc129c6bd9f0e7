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

// Random-search hyperparameter optimization for the circular game with seed
// replication and best-trial selection by L1 sum or L2 score.

#ifndef ECW_SWEEP_SWEEP_H_
#define ECW_SWEEP_SWEEP_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ecw/circle/trainer.h"
#include "ecw/metrics/metrics.h"
#include "ecw/nnet/rng.h"

namespace ecw::sweep {

struct SearchSpace {
  std::vector<int> vocab_choices = {64, 128, 256};
  double lr_min = 1e-4;
  double lr_max = 1e-2;
  int hidden_min = 16;
  int hidden_max = 64;
  double entropy_min = 1e-4;
  double entropy_max = 1.0;

  void Validate() const;
};

double LogUniform(nnet::Rng& rng, double lo, double hi);

// Draws vocabulary, then sender and receiver hyperparameters from separate
// streams. Fields outside the space (bias, schedule, mode, seed) come from
// base. Advances rng by one draw.
circle::TrainConfig DrawConfig(const SearchSpace& space, nnet::Rng& rng,
                               const circle::TrainConfig& base);

enum class Selector { kL1Sum, kL2Score };

std::string_view ToString(Selector selector);
Selector ParseSelector(std::string_view name);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string diagnostic;
  double loss_sender = 0.0;
  double loss_receiver = 0.0;
};

struct TrialResult {
  int config_id = 0;
  circle::TrainConfig config;
  std::vector<SeedOutcome> seeds;
  bool failed = false;
  int n_failed = 0;
  double mean_ls = 0.0;
  double mean_lr = 0.0;
  double l1_sum = 0.0;
  double l2_score = 0.0;
  metrics::OutcomeClass outcome = metrics::OutcomeClass::kNonCommunication;

  double Score(Selector selector) const {
    return selector == Selector::kL1Sum ? l1_sum : l2_score;
  }
};

// Seed for one (trial, replicate) pair. Depends only on its arguments, never
// on scheduling order.
std::uint64_t TrialSeed(std::uint64_t master_seed, int trial, int replicate);

// A trial with any failed seed is failed; means cover the seeds as given.
TrialResult AggregateTrial(int config_id, const circle::TrainConfig& config,
                           std::vector<SeedOutcome> seeds);

// Indices of non-failed trials, best first; ties broken by config id.
std::vector<int> RankTrials(std::span<const TrialResult> trials,
                            Selector selector);

struct SweepOptions {
  int budget = 100;
  int seeds = 5;
  std::uint64_t master_seed = 0;
  Selector selector = Selector::kL1Sum;
  // 0 = hardware concurrency.
  int threads = 0;
};

// 20 trials, 3 seeds, 10 epochs.
SweepOptions FastProfile(SweepOptions options);
inline constexpr int kFastEpochs = 10;

struct SweepResult {
  double bias_deg = 0.0;
  Selector selector = Selector::kL1Sum;
  std::vector<TrialResult> trials;  // by config id
  std::vector<int> ranking;
  int n_failed = 0;

  const TrialResult* Best() const {
    return ranking.empty() ? nullptr : &trials[ranking.front()];
  }
};

// Trains config on replicates 0..seeds-1, each with TrialSeed(master,
// config_id, k).
TrialResult RunTrial(int config_id, const circle::TrainConfig& config,
                     int seeds, std::uint64_t master_seed, int threads = 1);

SweepResult RunSweep(const SearchSpace& space, const circle::TrainConfig& base,
                     const SweepOptions& options);

// sweep.json, trials.csv, best.json and scatter_<b>.csv.
void WriteSweepDir(const std::filesystem::path& dir, const SweepResult& result);
SweepResult ReadSweepDir(const std::filesystem::path& dir);

std::string TrialsCsv(std::span<const TrialResult> trials);
std::vector<metrics::ScatterPoint> ScatterPoints(const SweepResult& result);
std::string BiasLabel(double bias_deg);

struct BiasCurveRow {
  double bias_deg = 0.0;
  double best_l1_sum = 0.0;
  int best_l1_config = -1;
  double best_l2_score = 0.0;
  int best_l2_config = -1;
  int n_trials = 0;
  int n_failed = 0;
};

// One row per bias that has at least one completed trial, ascending bias.
// Biases without completed trials are skipped with a warning on stderr.
std::vector<BiasCurveRow> BiasCurve(
    const std::map<double, SweepResult>& by_bias);
std::string BiasCurveCsv(std::span<const BiasCurveRow> rows);

}  // namespace ecw::sweep

#endif  // ECW_SWEEP_SWEEP_H_
