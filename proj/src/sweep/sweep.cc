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

#include "ecw/sweep/sweep.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "ecw/errors.h"
#include "ecw/util/io.h"
#include "ecw/util/parallel.h"

namespace ecw::sweep {

namespace fs = std::filesystem;
using nlohmann::json;

void SearchSpace::Validate() const {
  if (vocab_choices.empty()) throw ConfigError("vocab choices must not be empty");
  for (int v : vocab_choices) {
    if (v < 1) throw ConfigError("vocab choices must be >= 1");
  }
  if (!(lr_min > 0.0 && lr_min <= lr_max)) {
    throw ConfigError("learning-rate bounds must satisfy 0 < min <= max");
  }
  if (!(hidden_min >= 1 && hidden_min <= hidden_max)) {
    throw ConfigError("hidden bounds must satisfy 1 <= min <= max");
  }
  if (!(entropy_min > 0.0 && entropy_min <= entropy_max)) {
    throw ConfigError("entropy bounds must satisfy 0 < min <= max");
  }
}

double LogUniform(nnet::Rng& rng, double lo, double hi) {
  return std::exp(rng.Uniform(std::log(lo), std::log(hi)));
}

circle::TrainConfig DrawConfig(const SearchSpace& space, nnet::Rng& rng,
                               const circle::TrainConfig& base) {
  space.Validate();
  const std::uint64_t key = rng.engine()();
  nnet::Rng shared(nnet::MixSeed(key, 0));
  nnet::Rng sender(nnet::MixSeed(key, 1));
  nnet::Rng receiver(nnet::MixSeed(key, 2));

  circle::TrainConfig c = base;
  c.vocab_size = space.vocab_choices[shared.UniformInt(
      0, static_cast<int>(space.vocab_choices.size()) - 1)];
  auto hidden = [&space](nnet::Rng& r) {
    return static_cast<int>(std::lround(
        r.Uniform(static_cast<double>(space.hidden_min),
                  static_cast<double>(space.hidden_max))));
  };
  c.sender_lr = LogUniform(sender, space.lr_min, space.lr_max);
  c.sender_hidden = hidden(sender);
  c.sender_entropy = LogUniform(sender, space.entropy_min, space.entropy_max);
  c.receiver_lr = LogUniform(receiver, space.lr_min, space.lr_max);
  c.receiver_hidden = hidden(receiver);
  c.receiver_entropy =
      LogUniform(receiver, space.entropy_min, space.entropy_max);
  return c;
}

std::string_view ToString(Selector selector) {
  return selector == Selector::kL1Sum ? "l1_sum" : "l2_score";
}

Selector ParseSelector(std::string_view name) {
  if (name == "l1_sum") return Selector::kL1Sum;
  if (name == "l2_score") return Selector::kL2Score;
  throw ConfigError("unknown selector '" + std::string(name) + "'");
}

std::uint64_t TrialSeed(std::uint64_t master_seed, int trial, int replicate) {
  return nnet::MixSeed(
      nnet::MixSeed(master_seed, static_cast<std::uint64_t>(trial)),
      static_cast<std::uint64_t>(replicate));
}

TrialResult AggregateTrial(int config_id, const circle::TrainConfig& config,
                           std::vector<SeedOutcome> seeds) {
  TrialResult t;
  t.config_id = config_id;
  t.config = config;
  t.seeds = std::move(seeds);
  for (const SeedOutcome& s : t.seeds) {
    if (s.failed) ++t.n_failed;
  }
  t.failed = t.n_failed > 0 || t.seeds.empty();
  if (!t.failed) {
    for (const SeedOutcome& s : t.seeds) {
      t.mean_ls += s.loss_sender;
      t.mean_lr += s.loss_receiver;
    }
    t.mean_ls /= static_cast<double>(t.seeds.size());
    t.mean_lr /= static_cast<double>(t.seeds.size());
    t.l1_sum = metrics::L1Sum(t.mean_ls, t.mean_lr);
    t.l2_score = metrics::L2Score(t.mean_ls, t.mean_lr);
    t.outcome = metrics::Classify(t.mean_ls, t.mean_lr);
  }
  return t;
}

std::vector<int> RankTrials(std::span<const TrialResult> trials,
                            Selector selector) {
  std::vector<int> order;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!trials[i].failed) order.push_back(static_cast<int>(i));
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = trials[a].Score(selector);
    const double sb = trials[b].Score(selector);
    if (sa != sb) return sa < sb;
    return trials[a].config_id < trials[b].config_id;
  });
  return order;
}

SweepOptions FastProfile(SweepOptions options) {
  options.budget = 20;
  options.seeds = 3;
  return options;
}

namespace {

SeedOutcome RunSeed(circle::TrainConfig config, std::uint64_t seed) {
  config.seed = seed;
  const circle::RunRecord record = circle::Run(config);
  SeedOutcome out;
  out.seed = seed;
  if (record.failed || !record.summary) {
    out.failed = true;
    out.diagnostic = record.failed ? record.diagnostic : "no epochs ran";
    return out;
  }
  out.loss_sender = record.summary->eval_ls;
  out.loss_receiver = record.summary->eval_lr;
  return out;
}

}  // namespace

TrialResult RunTrial(int config_id, const circle::TrainConfig& config,
                     int seeds, std::uint64_t master_seed, int threads) {
  if (seeds < 1) throw ConfigError("seed count must be >= 1");
  std::vector<SeedOutcome> outcomes(seeds);
  util::ParallelFor(static_cast<std::size_t>(seeds), threads,
                    [&](std::size_t k) {
                      outcomes[k] = RunSeed(
                          config, TrialSeed(master_seed, config_id,
                                            static_cast<int>(k)));
                    });
  return AggregateTrial(config_id, config, std::move(outcomes));
}

SweepResult RunSweep(const SearchSpace& space, const circle::TrainConfig& base,
                     const SweepOptions& options) {
  if (options.budget < 1) throw ConfigError("budget must be >= 1");
  if (options.seeds < 1) throw ConfigError("seed count must be >= 1");
  base.Validate();

  std::vector<circle::TrainConfig> configs;
  nnet::Rng rng(options.master_seed);
  for (int t = 0; t < options.budget; ++t) {
    configs.push_back(DrawConfig(space, rng, base));
  }

  const std::size_t seeds = static_cast<std::size_t>(options.seeds);
  std::vector<SeedOutcome> outcomes(configs.size() * seeds);
  util::ParallelFor(outcomes.size(), options.threads, [&](std::size_t job) {
    const int trial = static_cast<int>(job / seeds);
    const int replicate = static_cast<int>(job % seeds);
    outcomes[job] = RunSeed(configs[trial],
                            TrialSeed(options.master_seed, trial, replicate));
  });

  SweepResult result;
  result.bias_deg = base.bias_deg;
  result.selector = options.selector;
  for (std::size_t t = 0; t < configs.size(); ++t) {
    std::vector<SeedOutcome> mine(outcomes.begin() + t * seeds,
                                  outcomes.begin() + (t + 1) * seeds);
    result.trials.push_back(
        AggregateTrial(static_cast<int>(t), configs[t], std::move(mine)));
    if (result.trials.back().failed) ++result.n_failed;
  }
  result.ranking = RankTrials(result.trials, options.selector);
  return result;
}

std::string BiasLabel(double bias_deg) {
  std::ostringstream out;
  out << bias_deg;
  return out.str();
}

namespace {

constexpr char kTrialsHeader[] =
    "config_id,mode,bias,epochs,vocab_size,sender_lr,receiver_lr,"
    "sender_hidden,receiver_hidden,sender_entropy,receiver_entropy,n_seeds,"
    "n_failed,failed,ls,lr,l1_sum,l2_score,outcome,seed_ls,seed_lr";

std::string JoinSeeds(const std::vector<SeedOutcome>& seeds, bool sender) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i > 0) out += ';';
    if (!seeds[i].failed) {
      out += util::FormatDouble(sender ? seeds[i].loss_sender
                                       : seeds[i].loss_receiver);
    }
  }
  return out;
}

std::vector<std::optional<double>> SplitSeeds(const std::string& cell) {
  std::vector<std::optional<double>> out;
  if (cell.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t semi = cell.find(';', start);
    const std::string part = cell.substr(
        start, semi == std::string::npos ? std::string::npos : semi - start);
    out.push_back(part.empty() ? std::nullopt
                               : std::optional<double>(std::stod(part)));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return out;
}

}  // namespace

std::string TrialsCsv(std::span<const TrialResult> trials) {
  std::ostringstream out;
  out << kTrialsHeader << '\n';
  for (const TrialResult& t : trials) {
    const circle::TrainConfig& c = t.config;
    auto score = [&t](double v) {
      return t.failed ? std::string() : util::FormatDouble(v);
    };
    out << t.config_id << ',' << circle::ToString(c.mode) << ','
        << util::FormatDouble(c.bias_deg) << ',' << c.epochs << ','
        << c.vocab_size << ',' << util::FormatDouble(c.sender_lr) << ','
        << util::FormatDouble(c.receiver_lr) << ',' << c.sender_hidden << ','
        << c.receiver_hidden << ',' << util::FormatDouble(c.sender_entropy)
        << ',' << util::FormatDouble(c.receiver_entropy) << ','
        << t.seeds.size() << ',' << t.n_failed << ',' << (t.failed ? 1 : 0)
        << ',' << score(t.mean_ls) << ',' << score(t.mean_lr) << ','
        << score(t.l1_sum) << ',' << score(t.l2_score) << ','
        << (t.failed ? std::string("failed")
                     : std::string(metrics::ToString(t.outcome)))
        << ',' << JoinSeeds(t.seeds, true) << ',' << JoinSeeds(t.seeds, false)
        << '\n';
  }
  return out.str();
}

std::vector<metrics::ScatterPoint> ScatterPoints(const SweepResult& result) {
  std::vector<metrics::ScatterPoint> points;
  for (const TrialResult& t : result.trials) {
    if (t.failed) continue;
    points.push_back({t.config_id, t.mean_ls, t.mean_lr, result.bias_deg,
                      static_cast<int>(t.seeds.size())});
  }
  return points;
}

namespace {

json TrialJson(const TrialResult& t) {
  json seeds = json::array();
  for (const SeedOutcome& s : t.seeds) {
    seeds.push_back({{"seed", s.seed},
                     {"failed", s.failed},
                     {"ls", s.failed ? json() : json(s.loss_sender)},
                     {"lr", s.failed ? json() : json(s.loss_receiver)}});
  }
  return {{"config_id", t.config_id},
          {"config", circle::ToJson(t.config)},
          {"ls", t.mean_ls},
          {"lr", t.mean_lr},
          {"l1_sum", t.l1_sum},
          {"l2_score", t.l2_score},
          {"outcome", metrics::ToString(t.outcome)},
          {"seeds", seeds}};
}

}  // namespace

void WriteSweepDir(const fs::path& dir, const SweepResult& result) {
  util::PrepareOutputDir(dir, {"trials.csv", "best.json"});
  util::WriteJsonFile(dir / "sweep.json",
                      {{"bias", result.bias_deg},
                       {"selector", ToString(result.selector)},
                       {"budget", result.trials.size()},
                       {"n_failed", result.n_failed}});
  util::WriteTextFile(dir / "trials.csv", TrialsCsv(result.trials));
  json best = {{"selector", ToString(result.selector)},
               {"n_trials", result.trials.size()},
               {"n_failed", result.n_failed}};
  best["best"] = result.Best() ? TrialJson(*result.Best()) : json();
  for (Selector s : {Selector::kL1Sum, Selector::kL2Score}) {
    const std::vector<int> order = RankTrials(result.trials, s);
    best[std::string("best_by_") + std::string(ToString(s))] =
        order.empty() ? json() : TrialJson(result.trials[order.front()]);
  }
  util::WriteJsonFile(dir / "best.json", best);
  const auto points = ScatterPoints(result);
  util::WriteTextFile(dir / ("scatter_" + BiasLabel(result.bias_deg) + ".csv"),
                      metrics::ScatterCsv(points));
}

SweepResult ReadSweepDir(const fs::path& dir) {
  const json meta = util::ReadJsonFile(dir / "sweep.json");
  const util::CsvTable table = util::CsvTable::Load(dir / "trials.csv");
  SweepResult result;
  try {
    result.bias_deg = meta.at("bias").get<double>();
    result.selector = ParseSelector(meta.at("selector").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(dir.string() + "/sweep.json: " + e.what());
  }
  for (std::size_t r = 0; r < table.rows(); ++r) {
    circle::TrainConfig c;
    c.mode = circle::ParseMessageMode(table.At(r, "mode"));
    c.bias_deg = table.Number(r, "bias");
    c.epochs = static_cast<int>(table.Number(r, "epochs"));
    c.vocab_size = static_cast<int>(table.Number(r, "vocab_size"));
    c.sender_lr = table.Number(r, "sender_lr");
    c.receiver_lr = table.Number(r, "receiver_lr");
    c.sender_hidden = static_cast<int>(table.Number(r, "sender_hidden"));
    c.receiver_hidden = static_cast<int>(table.Number(r, "receiver_hidden"));
    c.sender_entropy = table.Number(r, "sender_entropy");
    c.receiver_entropy = table.Number(r, "receiver_entropy");

    const auto ls = SplitSeeds(table.At(r, "seed_ls"));
    const auto lr = SplitSeeds(table.At(r, "seed_lr"));
    const auto n_seeds = static_cast<std::size_t>(table.Number(r, "n_seeds"));
    if (ls.size() != n_seeds || lr.size() != n_seeds) {
      throw ConfigError("trials.csv row " + std::to_string(r) +
                        ": per-seed columns disagree with n_seeds");
    }
    std::vector<SeedOutcome> seeds(n_seeds);
    for (std::size_t k = 0; k < n_seeds; ++k) {
      seeds[k].failed = !ls[k] || !lr[k];
      if (!seeds[k].failed) {
        seeds[k].loss_sender = *ls[k];
        seeds[k].loss_receiver = *lr[k];
      }
    }
    result.trials.push_back(AggregateTrial(
        static_cast<int>(table.Number(r, "config_id")), c, std::move(seeds)));
    if (result.trials.back().failed) ++result.n_failed;
  }
  result.ranking = RankTrials(result.trials, result.selector);
  return result;
}

std::vector<BiasCurveRow> BiasCurve(
    const std::map<double, SweepResult>& by_bias) {
  std::vector<BiasCurveRow> rows;
  for (const auto& [bias, result] : by_bias) {
    const std::vector<int> l1 = RankTrials(result.trials, Selector::kL1Sum);
    const std::vector<int> l2 = RankTrials(result.trials, Selector::kL2Score);
    if (l1.empty()) {
      std::cerr << "warning: no completed trials for bias " << bias
                << "; omitted from bias curve\n";
      continue;
    }
    BiasCurveRow row;
    row.bias_deg = bias;
    row.best_l1_sum = result.trials[l1.front()].l1_sum;
    row.best_l1_config = result.trials[l1.front()].config_id;
    row.best_l2_score = result.trials[l2.front()].l2_score;
    row.best_l2_config = result.trials[l2.front()].config_id;
    row.n_trials = static_cast<int>(result.trials.size());
    row.n_failed = result.n_failed;
    rows.push_back(row);
  }
  return rows;
}

std::string BiasCurveCsv(std::span<const BiasCurveRow> rows) {
  std::ostringstream out;
  out << "bias,best_l1_sum,best_l1_config,best_l2_score,best_l2_config,"
         "n_trials,n_failed\n";
  for (const BiasCurveRow& r : rows) {
    out << util::FormatDouble(r.bias_deg) << ','
        << util::FormatDouble(r.best_l1_sum) << ',' << r.best_l1_config << ','
        << util::FormatDouble(r.best_l2_score) << ',' << r.best_l2_config
        << ',' << r.n_trials << ',' << r.n_failed << '\n';
  }
  return out.str();
}

}  // namespace ecw::sweep
