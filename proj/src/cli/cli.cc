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

#include "ecw/cli/cli.h"

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ecw/circle/trainer.h"
#include "ecw/cli/plot.h"
#include "ecw/cli/report.h"
#include "ecw/errors.h"
#include "ecw/nego/train.h"
#include "ecw/sweep/sweep.h"
#include "ecw/util/io.h"

namespace ecw::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path OutputRoot() {
  const char* env = std::getenv("ECW_OUT_DIR");
  if (env != nullptr && *env != '\0') return env;
  return "runs";
}

namespace {

// A failed training run whose outputs were still written.
struct RunFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
void Override(const CLI::Option* opt, const T& value, T& field) {
  if (opt->count() > 0) field = value;
}

json LoadConfig(const std::string& path) {
  if (path.empty()) return json::object();
  json doc = util::ReadJsonFile(path);
  if (!doc.is_object()) throw ConfigError(path + ": config must be a JSON object");
  return doc;
}

json ToJson(const sweep::SearchSpace& s) {
  return {{"vocab_choices", s.vocab_choices},
          {"lr_min", s.lr_min},
          {"lr_max", s.lr_max},
          {"hidden_min", s.hidden_min},
          {"hidden_max", s.hidden_max},
          {"entropy_min", s.entropy_min},
          {"entropy_max", s.entropy_max}};
}

sweep::SearchSpace SearchSpaceFromJson(const json& doc) {
  sweep::SearchSpace s;
  try {
    s.vocab_choices = doc.value("vocab_choices", s.vocab_choices);
    s.lr_min = doc.value("lr_min", s.lr_min);
    s.lr_max = doc.value("lr_max", s.lr_max);
    s.hidden_min = doc.value("hidden_min", s.hidden_min);
    s.hidden_max = doc.value("hidden_max", s.hidden_max);
    s.entropy_min = doc.value("entropy_min", s.entropy_min);
    s.entropy_max = doc.value("entropy_max", s.entropy_max);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad search space: ") + e.what());
  }
  s.Validate();
  return s;
}

struct TrainFlags {
  std::string config;
  double bias = 0, lr = 0, sender_lr = 0, receiver_lr = 0, entropy = 0;
  int epochs = 0, batches = 0, batch_size = 0, vocab = 0, sender_hidden = 0,
      receiver_hidden = 0;
  std::uint64_t seed = 0;
  std::string mode;
  bool full_circle = false;
  CLI::Option *o_bias, *o_lr, *o_slr, *o_rlr, *o_ent, *o_epochs, *o_batches,
      *o_bs, *o_vocab, *o_sh, *o_rh, *o_seed, *o_mode, *o_full;

  void Register(CLI::App* app) {
    o_bias = app->add_option("--bias", bias, "bias b in degrees, 0..180");
    o_seed = app->add_option("--seed", seed, "run seed");
    o_epochs = app->add_option("--epochs", epochs, "training epochs");
    o_batches = app->add_option("--batches", batches, "batches per epoch");
    o_bs = app->add_option("--batch-size", batch_size, "games per batch");
    o_lr = app->add_option("--lr", lr, "learning rate for both agents");
    o_slr = app->add_option("--sender-lr", sender_lr, "sender learning rate");
    o_rlr = app->add_option("--receiver-lr", receiver_lr, "receiver learning rate");
    o_ent = app->add_option("--entropy", entropy, "sender entropy coefficient");
    o_mode = app->add_option("--mode", mode,
                             "discrete, gaussian_var or gaussian_logvar");
    o_vocab = app->add_option("--vocab", vocab, "vocabulary size");
    o_sh = app->add_option("--sender-hidden", sender_hidden, "sender width");
    o_rh = app->add_option("--receiver-hidden", receiver_hidden, "receiver width");
    o_full = app->add_flag("--full-circle", full_circle,
                           "evaluate on [0, 360) instead of [0, 180]");
  }

  void Apply(circle::TrainConfig& c) const {
    Override(o_bias, bias, c.bias_deg);
    Override(o_seed, seed, c.seed);
    Override(o_epochs, epochs, c.epochs);
    Override(o_batches, batches, c.batches_per_epoch);
    Override(o_bs, batch_size, c.batch_size);
    if (o_lr->count() > 0) c.sender_lr = c.receiver_lr = lr;
    Override(o_slr, sender_lr, c.sender_lr);
    Override(o_rlr, receiver_lr, c.receiver_lr);
    Override(o_ent, entropy, c.sender_entropy);
    if (o_mode->count() > 0) c.mode = circle::ParseMessageMode(mode);
    Override(o_vocab, vocab, c.vocab_size);
    Override(o_sh, sender_hidden, c.sender_hidden);
    Override(o_rh, receiver_hidden, c.receiver_hidden);
    if (o_full->count() > 0) c.eval_full_circle = true;
  }
};

int CircleTrain(const TrainFlags& flags, const std::string& out_flag,
                std::ostream& out) {
  circle::TrainConfig config =
      circle::TrainConfigFromJson(LoadConfig(flags.config));
  flags.Apply(config);
  config.Validate();
  const fs::path dir =
      out_flag.empty()
          ? OutputRoot() / ("circle_b" + sweep::BiasLabel(config.bias_deg) +
                            "_s" + std::to_string(config.seed))
          : fs::path(out_flag);
  util::PrepareOutputDir(dir, {"metrics.csv", "summary.json"});
  circle::Agents agents;
  const circle::RunRecord record = circle::Run(config, &agents);
  circle::WriteRunDir(dir, config, record, record.failed ? nullptr : &agents);
  if (record.failed) {
    throw RunFailed("run diverged: " + record.diagnostic + " (record in " +
                    dir.string() + ")");
  }
  json result = {{"dir", dir.string()}, {"epochs", record.epochs.size()}};
  if (record.summary) {
    result["eval_ls"] = record.summary->eval_ls;
    result["eval_lr"] = record.summary->eval_lr;
  }
  out << result.dump() << "\n";
  return kExitOk;
}

struct SweepFlags {
  int budget = 0, seeds = 0, threads = 0;
  std::uint64_t master_seed = 0;
  std::string selector;
  bool fast = false;
  CLI::Option *o_budget, *o_seeds, *o_threads, *o_master, *o_selector, *o_fast;

  void Register(CLI::App* app) {
    o_budget = app->add_option("--budget", budget, "number of trials");
    o_seeds = app->add_option("--seeds", seeds, "seeds per trial");
    o_master = app->add_option("--master-seed", master_seed, "sweep master seed");
    o_selector = app->add_option("--selector", selector, "l1_sum or l2_score");
    o_threads = app->add_option("--threads", threads, "worker threads (0 = all)");
    o_fast = app->add_flag("--fast", fast, "20 trials, 3 seeds, 10 epochs");
  }
};

int CircleSweep(const TrainFlags& tf, const SweepFlags& sf,
                const std::string& out_flag, std::ostream& out) {
  const json doc = LoadConfig(tf.config);
  circle::TrainConfig base =
      circle::TrainConfigFromJson(doc.value("base", json::object()));
  const sweep::SearchSpace space =
      SearchSpaceFromJson(doc.value("search", json::object()));
  sweep::SweepOptions options;
  bool fast = false;
  try {
    options.budget = doc.value("budget", options.budget);
    options.seeds = doc.value("seeds", options.seeds);
    options.master_seed = doc.value("master_seed", options.master_seed);
    options.threads = doc.value("threads", options.threads);
    if (doc.contains("selector")) {
      options.selector = sweep::ParseSelector(doc["selector"].get<std::string>());
    }
    fast = doc.value("fast", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad sweep config: ") + e.what());
  }
  fast = fast || sf.o_fast->count() > 0;
  if (fast) {
    options = sweep::FastProfile(options);
    base.epochs = sweep::kFastEpochs;
  }
  tf.Apply(base);
  Override(sf.o_budget, sf.budget, options.budget);
  Override(sf.o_seeds, sf.seeds, options.seeds);
  Override(sf.o_master, sf.master_seed, options.master_seed);
  Override(sf.o_threads, sf.threads, options.threads);
  if (sf.o_selector->count() > 0) {
    options.selector = sweep::ParseSelector(sf.selector);
  }
  if (options.budget < 1 || options.seeds < 1) {
    throw ConfigError("budget and seeds must be >= 1");
  }
  base.Validate();

  const fs::path dir =
      out_flag.empty()
          ? OutputRoot() / ("sweep_" + sweep::BiasLabel(base.bias_deg))
          : fs::path(out_flag);
  util::PrepareOutputDir(dir, {"trials.csv", "best.json", "config.json"});
  const sweep::SweepResult result = sweep::RunSweep(space, base, options);
  sweep::WriteSweepDir(dir, result);
  util::WriteJsonFile(dir / "config.json",
                      {{"kind", "circle_sweep"},
                       {"base", circle::ToJson(base)},
                       {"search", ToJson(space)},
                       {"budget", options.budget},
                       {"seeds", options.seeds},
                       {"master_seed", options.master_seed},
                       {"selector", sweep::ToString(options.selector)},
                       {"fast", fast},
                       {"threads", options.threads}});
  json summary = {{"dir", dir.string()},
                  {"trials", result.trials.size()},
                  {"failed", result.n_failed}};
  if (const sweep::TrialResult* best = result.Best()) {
    summary["best"] = {{"config_id", best->config_id},
                       {"ls", best->mean_ls},
                       {"lr", best->mean_lr}};
  }
  out << summary.dump() << "\n";
  return kExitOk;
}

struct NegoFlags {
  std::string config, channel, termination;
  int epochs = 0, batches = 0, batch_size = 0, hidden = 0, seeds = 0, threads = 1;
  double lr = 0;
  std::uint64_t seed = 0;
  bool mask_utility = false, literal_reward = false;
  CLI::Option *o_channel, *o_term, *o_epochs, *o_batches, *o_bs, *o_hidden,
      *o_seeds, *o_seed, *o_lr, *o_mask_u, *o_literal;

  void Register(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    o_channel = app->add_option(
        "--channel", channel,
        "none, proposal, linguistic, both or masked_linguistic");
    o_term = app->add_option("--termination", termination,
                             "explicit or proposal_agreement");
    o_epochs = app->add_option("--epochs", epochs, "training epochs");
    o_batches = app->add_option("--batches", batches, "batches per epoch");
    o_bs = app->add_option("--batch-size", batch_size, "games per batch");
    o_hidden = app->add_option("--hidden", hidden, "recurrent state size");
    o_lr = app->add_option("--lr", lr, "Adam learning rate");
    o_seed = app->add_option("--seed", seed, "first seed");
    o_seeds = app->add_option("--seeds", seeds, "number of seeds");
    app->add_option("--threads", threads, "worker threads (0 = all)");
    o_mask_u = app->add_flag("--mask-reveals-utility", mask_utility,
                             "masked messages reveal utilities, not proposals");
    o_literal = app->add_flag("--literal-reward", literal_reward,
                              "value both shares with the proposer's utilities");
  }
};

int NegoTrain(const NegoFlags& f, const std::string& out_flag,
              std::ostream& out) {
  const json doc = LoadConfig(f.config);
  nego::NegotiationConfig config = nego::NegotiationConfigFromJson(doc);
  std::uint64_t first_seed = 0;
  int n_seeds = 5;
  try {
    first_seed = doc.value("seed", first_seed);
    n_seeds = doc.value("n_seeds", n_seeds);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad negotiation config: ") + e.what());
  }
  if (f.o_channel->count() > 0) config.channel = nego::ParseChannel(f.channel);
  if (f.o_term->count() > 0) {
    config.termination = nego::ParseTermination(f.termination);
  }
  Override(f.o_epochs, f.epochs, config.epochs);
  Override(f.o_batches, f.batches, config.batches_per_epoch);
  Override(f.o_bs, f.batch_size, config.batch_size);
  Override(f.o_hidden, f.hidden, config.hidden_size);
  Override(f.o_lr, f.lr, config.learning_rate);
  if (f.o_mask_u->count() > 0) config.mask_reveals_utility = true;
  if (f.o_literal->count() > 0) config.literal_reward = true;
  Override(f.o_seed, f.seed, first_seed);
  Override(f.o_seeds, f.seeds, n_seeds);
  if (n_seeds < 1) throw ConfigError("seeds must be >= 1");
  config.Validate();

  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < n_seeds; ++k) seeds.push_back(first_seed + k);
  const fs::path dir = out_flag.empty() ? OutputRoot() / nego::NegoDirName(config)
                                        : fs::path(out_flag);
  util::PrepareOutputDir(dir, {"metrics.csv", "summary.json"});
  const nego::SelfPlayResult result =
      nego::TrainSelfPlay(config, seeds, f.threads);
  nego::WriteSelfPlayDir(dir, result);

  json finals = json::array();
  int failed = 0;
  for (const nego::NegoRunRecord& r : result.runs) {
    failed += r.failed;
    const auto w = nego::Final(r);
    finals.push_back(w ? json{{"seed", r.seed},
                              {"reward_a", w->reward_a},
                              {"reward_b", w->reward_b}}
                       : json{{"seed", r.seed}, {"failed", true}});
  }
  out << json{{"dir", dir.string()}, {"final", finals}}.dump() << "\n";
  if (failed > 0) {
    throw RunFailed(std::to_string(failed) + " of " +
                    std::to_string(n_seeds) + " seeds diverged (records in " +
                    dir.string() + ")");
  }
  return kExitOk;
}

void PrintError(std::ostream& err, const char* kind, const std::string& msg) {
  err << json{{"error", {{"kind", kind}, {"message", msg}}}}.dump() << "\n";
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Emergent communication experiments", "ecw"};
  app.require_subcommand(1);

  std::string out_dir;
  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand("circle-train", "train one circular-game run");
  train->add_option("--config", train_flags.config, "JSON TrainConfig file");
  train->add_option("--out", out_dir, "run directory");
  train_flags.Register(train);

  TrainFlags sweep_train_flags;
  SweepFlags sweep_flags;
  CLI::App* sweep_cmd =
      app.add_subcommand("circle-sweep", "random-search hyperparameter sweep");
  sweep_cmd->add_option("--config", sweep_train_flags.config,
                        "JSON {base, search, budget, seeds, ...}");
  sweep_cmd->add_option("--out", out_dir, "sweep directory");
  sweep_train_flags.Register(sweep_cmd);
  sweep_flags.Register(sweep_cmd);

  NegoFlags nego_flags;
  CLI::App* nego_cmd = app.add_subcommand("nego-train", "negotiation self-play");
  nego_cmd->add_option("--out", out_dir, "output directory");
  nego_flags.Register(nego_cmd);

  std::vector<std::string> sweep_dirs;
  CLI::App* report = app.add_subcommand("report", "bias curve and summaries");
  report->add_option("--sweep-dirs", sweep_dirs, "sweep directories")->required();
  report->add_option("--out", out_dir, "report directory");

  std::vector<std::string> plot_dirs;
  CLI::App* plot = app.add_subcommand("plot", "emit SVG figures");
  plot->add_option("dirs", plot_dirs, "run, sweep, negotiation or report dirs")
      ->required();
  plot->add_option("--out", out_dir, "figure directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    PrintError(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (train->parsed()) return CircleTrain(train_flags, out_dir, out);
    if (sweep_cmd->parsed()) {
      return CircleSweep(sweep_train_flags, sweep_flags, out_dir, out);
    }
    if (nego_cmd->parsed()) return NegoTrain(nego_flags, out_dir, out);
    if (report->parsed()) {
      const std::vector<fs::path> dirs(sweep_dirs.begin(), sweep_dirs.end());
      const fs::path dest = out_dir.empty() ? OutputRoot() / "report" : fs::path(out_dir);
      WriteReport(dest, BuildReport(dirs));
      out << json{{"dir", dest.string()}}.dump() << "\n";
      return kExitOk;
    }
    if (plot->parsed()) {
      const std::vector<fs::path> dirs(plot_dirs.begin(), plot_dirs.end());
      const fs::path dest = out_dir.empty() ? OutputRoot() / "plots" : fs::path(out_dir);
      json files = json::array();
      for (const fs::path& p : PlotDirs(dirs, dest)) files.push_back(p.string());
      out << json{{"files", files}}.dump() << "\n";
      return kExitOk;
    }
  } catch (const UsageError& e) {
    PrintError(err, "usage", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    PrintError(err, "config", e.what());
    return kExitConfig;
  } catch (const RunFailed& e) {
    PrintError(err, "divergence", e.what());
    return kExitDivergence;
  } catch (const DivergenceError& e) {
    PrintError(err, "divergence", e.what());
    return kExitDivergence;
  } catch (const fs::filesystem_error& e) {
    PrintError(err, "io", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    PrintError(err, "internal", e.what());
    return kExitInternal;
  }
  PrintError(err, "usage", "no subcommand given");
  return kExitUsage;
}

}  // namespace ecw::cli
