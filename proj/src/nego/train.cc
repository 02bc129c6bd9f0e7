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

#include "ecw/nego/train.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecw/errors.h"
#include "ecw/util/io.h"
#include "ecw/util/parallel.h"

namespace ecw::nego {

using Eigen::MatrixXd;
using Eigen::VectorXd;

AgentPair MakeAgents(const NegotiationConfig& config, std::uint64_t seed) {
  const nnet::Rng root(seed);
  nnet::Rng rng_a = root.Split(0);
  nnet::Rng rng_b = root.Split(1);
  return {AgentPolicy(config, rng_a), AgentPolicy(config, rng_b)};
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

VectorXd SoftmaxOf(const VectorXd& logits) {
  VectorXd p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

int SampleCategorical(const VectorXd& logits, nnet::Rng& rng) {
  const VectorXd p = SoftmaxOf(logits);
  double u = rng.Uniform();
  for (int k = 0; k + 1 < p.size(); ++k) {
    u -= p(k);
    if (u < 0) return k;
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace

VectorXd CategoricalLogitGrad(const VectorXd& logits, int choice,
                              double advantage, double entropy_coeff) {
  const VectorXd shifted = logits.array() - logits.maxCoeff();
  const VectorXd log_p =
      shifted.array() - std::log(shifted.array().exp().sum());
  const VectorXd p = log_p.array().exp();
  const double entropy = -p.dot(log_p);
  VectorXd g = advantage * p;
  g(choice) -= advantage;
  g.array() += entropy_coeff * p.array() * (log_p.array() + entropy);
  return g;
}

double BernoulliLogitGrad(double logit, bool outcome, double advantage,
                          double entropy_coeff) {
  const double s = Sigmoid(logit);
  return -advantage * ((outcome ? 1.0 : 0.0) - s) +
         entropy_coeff * logit * s * (1.0 - s);
}

SelfPlayRollout Rollout(const AgentPair& agents,
                        const NegotiationConfig& config, nnet::Rng& rng) {
  const int batch = config.batch_size;
  const int hidden = config.hidden_size;
  const int obs_dim = ObservationSize(config);
  SelfPlayRollout r;
  r.games.reserve(batch);
  for (int b = 0; b < batch; ++b) r.games.push_back(InitGame(config, rng));

  std::array<MatrixXd, 2> h = {MatrixXd::Zero(hidden, batch),
                               MatrixXd::Zero(hidden, batch)};
  MatrixXd obs(obs_dim, batch);
  for (int t = 0; t < config.max_rounds; ++t) {
    const bool any_alive = std::any_of(
        r.games.begin(), r.games.end(),
        [](const NegotiationState& g) { return !g.terminal(); });
    if (!any_alive) break;

    const int j = t % 2;
    StepRecord s;
    s.agent = j;
    s.alive.assign(batch, 0);
    s.term_used.assign(batch, 0);
    s.proposal_used.assign(batch, 0);
    s.message_used.assign(batch, 0);
    s.terminate.assign(batch, 0);
    s.proposal = Eigen::MatrixXi::Zero(kNumItemTypes, batch);
    if (config.Linguistic()) {
      s.utterance = Eigen::MatrixXi::Zero(config.utterance_length, batch);
    }
    if (config.Masked()) s.mask = Eigen::MatrixXi::Zero(kNumItemTypes, batch);

    obs.setZero();
    for (int b = 0; b < batch; ++b) {
      if (!r.games[b].terminal()) ObserveInto(r.games[b], config, j, obs.col(b));
    }
    s.out = agents[j].Forward(obs, h[j]);
    if (!s.out.hidden.allFinite() || !s.out.term.allFinite() ||
        !s.out.proposal.allFinite()) {
      throw DivergenceError("non-finite policy output at turn " +
                            std::to_string(t));
    }
    h[j] = s.out.hidden;

    for (int b = 0; b < batch; ++b) {
      NegotiationState& g = r.games[b];
      if (g.terminal()) continue;
      s.alive[b] = 1;
      AgentTurn turn;
      turn.agent = j;
      const bool standing = g.last_proposal[1 - j].has_value();
      bool accept = false;
      if (config.termination == Termination::kExplicit) {
        turn.terminate = rng.Uniform() < Sigmoid(s.out.term(0, b));
        s.terminate[b] = turn.terminate;
        s.term_used[b] = standing;
        accept = turn.terminate && standing;
      }
      for (int k = 0; k < kNumItemTypes; ++k) {
        turn.proposal[k] = SampleCategorical(
            s.out.proposal.block(k * kProposalChoices, b, kProposalChoices, 1),
            rng);
        s.proposal(k, b) = turn.proposal[k];
      }
      if (config.Linguistic()) {
        turn.utterance.resize(config.utterance_length);
        for (int pos = 0; pos < config.utterance_length; ++pos) {
          turn.utterance[pos] = SampleCategorical(
              s.out.utterance.block(pos * config.vocab_size, b,
                                    config.vocab_size, 1),
              rng);
          s.utterance(pos, b) = turn.utterance[pos];
        }
      }
      if (config.Masked()) {
        for (int k = 0; k < kNumItemTypes; ++k) {
          turn.mask[k] = rng.Uniform() < Sigmoid(s.out.mask(k, b)) ? 1 : 0;
          s.mask(k, b) = turn.mask[k];
        }
      }
      g = Step(std::move(g), turn, config);
      s.proposal_used[b] = !accept;
      s.message_used[b] = !accept && g.outcome != Outcome::kAccepted;
    }
    r.steps.push_back(std::move(s));
  }

  r.rewards.resize(2, batch);
  r.returns.resize(2, batch);
  for (int b = 0; b < batch; ++b) {
    const std::array<double, 2> rw = Rewards(r.games[b], config);
    r.rewards(0, b) = rw[0];
    r.rewards(1, b) = rw[1];
    const std::array<double, 2> ret =
        config.raw_return ? RawRewards(r.games[b], config) : rw;
    r.returns(0, b) = ret[0];
    r.returns(1, b) = ret[1];
  }
  return r;
}

NegoBatchStats BatchStats(const SelfPlayRollout& rollout,
                          const NegotiationConfig& config) {
  NegoBatchStats stats;
  const double n = static_cast<double>(rollout.games.size());
  stats.reward_a = rollout.rewards.row(0).mean();
  stats.reward_b = rollout.rewards.row(1).mean();
  int accepted = 0;
  for (const NegotiationState& g : rollout.games) {
    accepted += g.outcome == Outcome::kAccepted;
  }
  stats.agreement_rate = accepted / n;
  if (config.Masked()) {
    std::array<double, 2> on{0, 0}, total{0, 0};
    for (const StepRecord& s : rollout.steps) {
      for (std::size_t b = 0; b < s.message_used.size(); ++b) {
        if (!s.message_used[b]) continue;
        on[s.agent] += s.mask.col(b).sum();
        total[s.agent] += kNumItemTypes;
      }
    }
    for (int j = 0; j < 2; ++j) {
      if (total[j] > 0) stats.unmask[j] = on[j] / total[j];
    }
  }
  return stats;
}

void AccumulateGradients(AgentPair& agents, const SelfPlayRollout& rollout,
                         const NegotiationConfig& config) {
  const int batch = static_cast<int>(rollout.games.size());
  const double scale = 1.0 / batch;
  for (int j = 0; j < 2; ++j) {
    const Eigen::RowVectorXd rewards = rollout.returns.row(j);
    Eigen::RowVectorXd adv = rewards;
    if (batch > 1) {
      const double total = rewards.sum();
      for (int b = 0; b < batch; ++b) {
        adv(b) = rewards(b) - (total - rewards(b)) / (batch - 1);
      }
    }
    AgentPolicy& policy = agents[j];
    MatrixXd grad_h = MatrixXd::Zero(policy.hidden_size(), batch);
    for (auto it = rollout.steps.rbegin(); it != rollout.steps.rend(); ++it) {
      const StepRecord& s = *it;
      if (s.agent != j) continue;
      PolicyHeadGrads hg;
      hg.term = MatrixXd::Zero(1, batch);
      hg.proposal = MatrixXd::Zero(s.out.proposal.rows(), batch);
      if (policy.has_utterance()) {
        hg.utterance = MatrixXd::Zero(s.out.utterance.rows(), batch);
      }
      if (policy.has_mask()) hg.mask = MatrixXd::Zero(kNumItemTypes, batch);
      for (int b = 0; b < batch; ++b) {
        if (!s.alive[b]) continue;
        const double a = adv(b);
        if (s.term_used[b]) {
          hg.term(0, b) = scale * BernoulliLogitGrad(
                                      s.out.term(0, b), s.terminate[b], a,
                                      config.term_entropy);
        }
        if (s.proposal_used[b]) {
          for (int k = 0; k < kNumItemTypes; ++k) {
            hg.proposal.block(k * kProposalChoices, b, kProposalChoices, 1) =
                scale * CategoricalLogitGrad(
                            s.out.proposal.block(k * kProposalChoices, b,
                                                 kProposalChoices, 1),
                            s.proposal(k, b), a, config.proposal_entropy);
          }
        }
        if (s.message_used[b] && policy.has_utterance()) {
          const int v = config.vocab_size;
          for (int pos = 0; pos < config.utterance_length; ++pos) {
            hg.utterance.block(pos * v, b, v, 1) =
                scale * CategoricalLogitGrad(s.out.utterance.block(pos * v, b, v, 1),
                                             s.utterance(pos, b), a,
                                             config.utterance_entropy);
          }
        }
        if (s.message_used[b] && policy.has_mask()) {
          for (int k = 0; k < kNumItemTypes; ++k) {
            hg.mask(k, b) = scale * BernoulliLogitGrad(
                                        s.out.mask(k, b), s.mask(k, b) == 1, a,
                                        config.utterance_entropy);
          }
        }
      }
      grad_h = policy.Backward(s.out, grad_h, hg);
    }
  }
}

NegoBatchStats TrainBatch(AgentPair& agents, const NegotiationConfig& config,
                          nnet::Rng& rng) {
  const SelfPlayRollout rollout = Rollout(agents, config, rng);
  AccumulateGradients(agents, rollout, config);
  for (AgentPolicy& policy : agents) {
    policy.AdamStep(config.learning_rate, config.adam);
  }
  return BatchStats(rollout, config);
}

NegoRunRecord RunSelfPlay(const NegotiationConfig& config, std::uint64_t seed,
                          AgentPair* final_agents) {
  config.Validate();
  NegoRunRecord record;
  record.seed = seed;
  AgentPair agents = MakeAgents(config, seed);
  nnet::Rng rng = nnet::Rng(seed).Split(2);
  try {
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      NegoEpochRecord row;
      row.epoch = epoch;
      std::array<double, 2> unmask_sum{0, 0};
      std::array<int, 2> unmask_n{0, 0};
      for (int batch = 0; batch < config.batches_per_epoch; ++batch) {
        const NegoBatchStats stats = TrainBatch(agents, config, rng);
        row.reward_a += stats.reward_a;
        row.reward_b += stats.reward_b;
        for (int j = 0; j < 2; ++j) {
          if (stats.unmask[j]) {
            unmask_sum[j] += *stats.unmask[j];
            ++unmask_n[j];
          }
        }
      }
      row.reward_a /= config.batches_per_epoch;
      row.reward_b /= config.batches_per_epoch;
      if (unmask_n[0] > 0) row.unmask_a = unmask_sum[0] / unmask_n[0];
      if (unmask_n[1] > 0) row.unmask_b = unmask_sum[1] / unmask_n[1];
      record.epochs.push_back(row);
    }
  } catch (const DivergenceError& e) {
    record.failed = true;
    record.diagnostic = e.what();
  }
  if (final_agents != nullptr) *final_agents = std::move(agents);
  return record;
}

std::optional<FinalWindow> Final(const NegoRunRecord& run) {
  if (run.failed || run.epochs.empty()) return std::nullopt;
  const int n = static_cast<int>(run.epochs.size());
  FinalWindow w;
  w.window = std::max(1, static_cast<int>(std::ceil(0.1 * n)));
  std::array<double, 2> um{0, 0};
  std::array<int, 2> um_n{0, 0};
  for (int e = n - w.window; e < n; ++e) {
    const NegoEpochRecord& r = run.epochs[e];
    w.reward_a += r.reward_a;
    w.reward_b += r.reward_b;
    if (r.unmask_a) um[0] += *r.unmask_a, ++um_n[0];
    if (r.unmask_b) um[1] += *r.unmask_b, ++um_n[1];
  }
  w.reward_a /= w.window;
  w.reward_b /= w.window;
  if (um_n[0] > 0) w.unmask_a = um[0] / um_n[0];
  if (um_n[1] > 0) w.unmask_b = um[1] / um_n[1];
  return w;
}

SelfPlayResult TrainSelfPlay(const NegotiationConfig& config,
                             const std::vector<std::uint64_t>& seeds,
                             int threads) {
  SelfPlayResult result;
  result.config = config;
  result.runs.resize(seeds.size());
  result.agents.resize(seeds.size());
  util::ParallelFor(seeds.size(), threads, [&](std::size_t k) {
    result.runs[k] = RunSelfPlay(config, seeds[k], &result.agents[k]);
  });
  return result;
}

std::vector<NegoEpochRecord> MeanCurve(const std::vector<NegoRunRecord>& runs) {
  std::vector<const NegoRunRecord*> ok;
  for (const NegoRunRecord& r : runs) {
    if (!r.failed) ok.push_back(&r);
  }
  if (ok.empty()) return {};
  std::size_t n = ok.front()->epochs.size();
  for (const NegoRunRecord* r : ok) n = std::min(n, r->epochs.size());
  std::vector<NegoEpochRecord> curve(n);
  for (std::size_t e = 0; e < n; ++e) {
    NegoEpochRecord& row = curve[e];
    row.epoch = static_cast<int>(e);
    std::array<double, 2> um{0, 0};
    std::array<int, 2> um_n{0, 0};
    for (const NegoRunRecord* r : ok) {
      const NegoEpochRecord& src = r->epochs[e];
      row.reward_a += src.reward_a / ok.size();
      row.reward_b += src.reward_b / ok.size();
      if (src.unmask_a) um[0] += *src.unmask_a, ++um_n[0];
      if (src.unmask_b) um[1] += *src.unmask_b, ++um_n[1];
    }
    if (um_n[0] > 0) row.unmask_a = um[0] / um_n[0];
    if (um_n[1] > 0) row.unmask_b = um[1] / um_n[1];
  }
  return curve;
}

std::string NegoDirName(const NegotiationConfig& config) {
  return "nego_" + std::string(ToString(config.channel)) + "_" +
         std::string(ToString(config.termination));
}

std::string NegoMetricsCsv(const std::vector<NegoEpochRecord>& epochs) {
  std::ostringstream out;
  out << kNegoMetricsHeader << "\n";
  for (const NegoEpochRecord& r : epochs) {
    out << r.epoch << "," << util::FormatDouble(r.reward_a) << ","
        << util::FormatDouble(r.reward_b) << ","
        << util::FormatOptional(r.unmask_a) << ","
        << util::FormatOptional(r.unmask_b) << "\n";
  }
  return out.str();
}

std::vector<NegoEpochRecord> ParseNegoMetricsCsv(const std::string& text) {
  const util::CsvTable table = util::CsvTable::Parse(text);
  std::vector<NegoEpochRecord> out;
  for (std::size_t row = 0; row < table.rows(); ++row) {
    NegoEpochRecord r;
    r.epoch = static_cast<int>(table.Number(row, "epoch"));
    r.reward_a = table.Number(row, "reward_a");
    r.reward_b = table.Number(row, "reward_b");
    r.unmask_a = table.OptionalNumber(row, "unmask_a");
    r.unmask_b = table.OptionalNumber(row, "unmask_b");
    out.push_back(r);
  }
  return out;
}

namespace {

nlohmann::json FinalToJson(const std::optional<FinalWindow>& w) {
  if (!w) return nullptr;
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  return {{"reward_a", w->reward_a},
          {"reward_b", w->reward_b},
          {"unmask_a", opt(w->unmask_a)},
          {"unmask_b", opt(w->unmask_b)},
          {"window", w->window}};
}

}  // namespace

void WriteSelfPlayDir(const std::filesystem::path& dir,
                      const SelfPlayResult& result) {
  util::PrepareOutputDir(dir, {"metrics.csv", "summary.json"});
  nlohmann::json config = ToJson(result.config);
  nlohmann::json seeds = nlohmann::json::array();
  for (const NegoRunRecord& r : result.runs) seeds.push_back(r.seed);
  config["seeds"] = seeds;
  util::WriteJsonFile(dir / "config.json", config);

  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const NegoRunRecord& r = result.runs[k];
    const std::filesystem::path seed_dir =
        dir / ("seed_" + std::to_string(r.seed));
    util::PrepareOutputDir(seed_dir, {"metrics.csv"});
    util::WriteTextFile(seed_dir / "metrics.csv", NegoMetricsCsv(r.epochs));
    if (k < result.agents.size() && result.agents[k][0].obs_dim() > 0) {
      util::WriteJsonFile(seed_dir / "agent_a.json", ToJson(result.agents[k][0]));
      util::WriteJsonFile(seed_dir / "agent_b.json", ToJson(result.agents[k][1]));
    }
    runs.push_back({{"seed", r.seed},
                    {"failed", r.failed},
                    {"diagnostic", r.diagnostic},
                    {"epochs", r.epochs.size()},
                    {"final", FinalToJson(Final(r))}});
  }
  util::WriteTextFile(dir / "metrics.csv", NegoMetricsCsv(MeanCurve(result.runs)));
  util::WriteJsonFile(dir / "summary.json", {{"runs", runs}});
}

}  // namespace ecw::nego
