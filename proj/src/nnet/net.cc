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

#include "ecw/nnet/net.h"

#include <cmath>
#include <set>

#include "ecw/errors.h"

namespace ecw::nnet {

void NetSpec::Validate() const {
  if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
  for (int h : hidden_dims) {
    if (h < 1) throw ConfigError("hidden dims must be >= 1");
  }
  if (heads.empty()) throw ConfigError("network needs at least one head");
  std::set<std::string> names;
  for (const auto& head : heads) {
    if (head.dim < 1) throw ConfigError("head '" + head.name + "' dim < 1");
    if (!names.insert(head.name).second) {
      throw ConfigError("duplicate head name '" + head.name + "'");
    }
  }
}

int NetSpec::HeadIndex(std::string_view name) const {
  for (std::size_t i = 0; i < heads.size(); ++i) {
    if (heads[i].name == name) return static_cast<int>(i);
  }
  throw ConfigError("unknown head '" + std::string(name) + "'");
}

Dense::Dense(int in_dim, int out_dim)
    : w(Eigen::MatrixXd::Zero(out_dim, in_dim)),
      grad_w(Eigen::MatrixXd::Zero(out_dim, in_dim)),
      m_w(Eigen::MatrixXd::Zero(out_dim, in_dim)),
      v_w(Eigen::MatrixXd::Zero(out_dim, in_dim)),
      b(Eigen::VectorXd::Zero(out_dim)),
      grad_b(Eigen::VectorXd::Zero(out_dim)),
      m_b(Eigen::VectorXd::Zero(out_dim)),
      v_b(Eigen::VectorXd::Zero(out_dim)) {}

Eigen::MatrixXd Dense::Apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y = w * x;
  y.colwise() += b;
  return y;
}

Eigen::MatrixXd Dense::Backprop(const Eigen::MatrixXd& x,
                                const Eigen::MatrixXd& grad_out) {
  grad_w.noalias() += grad_out * x.transpose();
  grad_b += grad_out.rowwise().sum();
  return w.transpose() * grad_out;
}

void Dense::ZeroGrad() {
  grad_w.setZero();
  grad_b.setZero();
}

bool Dense::GradFinite() const {
  return grad_w.allFinite() && grad_b.allFinite();
}

Dense InitDense(int in_dim, int out_dim, Rng& rng) {
  Dense layer(in_dim, out_dim);
  const double bound = std::sqrt(1.0 / in_dim);
  for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      layer.w(r, c) = rng.Uniform(-bound, bound);
    }
  }
  return layer;
}

NetParams Init(const NetSpec& spec, Rng& rng) {
  spec.Validate();
  NetParams params;
  auto make = [&rng](int in, int out) { return InitDense(in, out, rng); };
  int in = spec.input_dim;
  for (int h : spec.hidden_dims) {
    params.hidden.push_back(make(in, h));
    in = h;
  }
  for (const auto& head : spec.heads) params.heads.push_back(make(in, head.dim));
  return params;
}

namespace {

void CheckShapes(const NetParams& params, const NetSpec& spec) {
  if (params.hidden.size() != spec.hidden_dims.size() ||
      params.heads.size() != spec.heads.size()) {
    throw ConfigError("parameter layout does not match network spec");
  }
}

}  // namespace

ForwardResult Forward(const NetParams& params, const NetSpec& spec,
                      const Eigen::MatrixXd& inputs) {
  CheckShapes(params, spec);
  if (inputs.rows() != spec.input_dim) {
    throw ConfigError("input has " + std::to_string(inputs.rows()) +
                      " rows, network expects " +
                      std::to_string(spec.input_dim));
  }
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.input = inputs;
  const Eigen::MatrixXd* x = &cache.input;
  for (const Dense& layer : params.hidden) {
    cache.pre.push_back(layer.Apply(*x));
    // ReLU; the subgradient at 0 is taken as 0 in Backward.
    cache.post.push_back(cache.pre.back().cwiseMax(0.0));
    x = &cache.post.back();
  }
  for (std::size_t h = 0; h < params.heads.size(); ++h) {
    result.heads.emplace(spec.heads[h].name, params.heads[h].Apply(*x));
  }
  return result;
}

ForwardResult Forward(const NetParams& params, const NetSpec& spec,
                      const Eigen::VectorXd& input) {
  return Forward(params, spec, Eigen::MatrixXd(input));
}

Eigen::MatrixXd Backward(
    NetParams& params, const NetSpec& spec, const ForwardCache& cache,
    const std::map<std::string, Eigen::MatrixXd>& head_grads) {
  if (cache.empty()) throw UsageError("Backward called without a forward cache");
  CheckShapes(params, spec);
  const Eigen::Index batch = cache.input.cols();
  const Eigen::MatrixXd& top =
      cache.post.empty() ? cache.input : cache.post.back();

  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(top.rows(), batch);
  for (std::size_t h = 0; h < params.heads.size(); ++h) {
    auto it = head_grads.find(spec.heads[h].name);
    if (it == head_grads.end()) continue;
    if (it->second.rows() != spec.heads[h].dim || it->second.cols() != batch) {
      throw ConfigError("gradient for head '" + spec.heads[h].name +
                        "' has the wrong shape");
    }
    grad += params.heads[h].Backprop(top, it->second);
  }
  for (std::size_t l = params.hidden.size(); l-- > 0;) {
    grad = grad.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
    const Eigen::MatrixXd& below = l == 0 ? cache.input : cache.post[l - 1];
    grad = params.hidden[l].Backprop(below, grad);
  }
  return grad;
}

void AdamStep(std::span<Dense* const> layers, std::int64_t& step,
              double learning_rate, const AdamConfig& config) {
  for (const Dense* layer : layers) {
    if (!layer->GradFinite()) {
      throw DivergenceError("non-finite gradient at Adam step " +
                            std::to_string(step + 1));
    }
  }
  ++step;
  const double t = static_cast<double>(step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  auto update = [&](auto& param, auto& grad, auto& m, auto& v) {
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseAbs2();
    param.array() -= learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + config.epsilon);
    grad.setZero();
  };
  for (Dense* layer : layers) {
    update(layer->w, layer->grad_w, layer->m_w, layer->v_w);
    update(layer->b, layer->grad_b, layer->m_b, layer->v_b);
  }
}

void AdamStep(NetParams& params, double learning_rate,
              const AdamConfig& config) {
  const std::vector<Dense*> layers = Layers(params);
  AdamStep(layers, params.step, learning_rate, config);
}

void ZeroGrad(NetParams& params) {
  for (Dense* layer : Layers(params)) layer->ZeroGrad();
}

std::vector<Dense*> Layers(NetParams& params) {
  std::vector<Dense*> layers;
  for (Dense& layer : params.hidden) layers.push_back(&layer);
  for (Dense& layer : params.heads) layers.push_back(&layer);
  return layers;
}

}  // namespace ecw::nnet
