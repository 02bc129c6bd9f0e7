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

// A minimal feedforward network engine: dense layers with hand-written
// reverse-mode gradients and Adam updates. Inputs are column-major batches
// (one sample per column); single-sample overloads wrap a one-column batch.

#ifndef ECW_NNET_NET_H_
#define ECW_NNET_NET_H_

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecw/nnet/rng.h"

namespace ecw::nnet {

enum class Activation { kRelu };

struct HeadSpec {
  std::string name;
  int dim = 1;
};

struct NetSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims;
  std::vector<HeadSpec> heads;
  Activation activation = Activation::kRelu;

  // Throws ConfigError on non-positive dims, no heads or duplicate names.
  void Validate() const;
  // Throws ConfigError for unknown names.
  int HeadIndex(std::string_view name) const;
};

// An affine map y = W x + b together with its gradient accumulator and Adam
// moment buffers. All buffers share the parameter shapes.
struct Dense {
  Eigen::MatrixXd w, grad_w, m_w, v_w;
  Eigen::VectorXd b, grad_b, m_b, v_b;

  Dense() = default;
  Dense(int in_dim, int out_dim);

  int in_dim() const { return static_cast<int>(w.cols()); }
  int out_dim() const { return static_cast<int>(w.rows()); }

  Eigen::MatrixXd Apply(const Eigen::MatrixXd& x) const;
  // Accumulates dL/dW and dL/db from the layer input and output gradient and
  // returns dL/dx.
  Eigen::MatrixXd Backprop(const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& grad_out);
  void ZeroGrad();
  bool GradFinite() const;
};

struct NetParams {
  std::vector<Dense> hidden;
  std::vector<Dense> heads;  // same order as NetSpec::heads
  std::int64_t step = 0;
};

struct ForwardCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre;   // per hidden layer, before activation
  std::vector<Eigen::MatrixXd> post;  // per hidden layer, after activation

  bool empty() const { return input.size() == 0; }
};

struct ForwardResult {
  std::map<std::string, Eigen::MatrixXd> heads;
  ForwardCache cache;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Weights uniform in +-sqrt(1/fan_in), biases zero.
Dense InitDense(int in_dim, int out_dim, Rng& rng);
NetParams Init(const NetSpec& spec, Rng& rng);

ForwardResult Forward(const NetParams& params, const NetSpec& spec,
                      const Eigen::MatrixXd& inputs);
ForwardResult Forward(const NetParams& params, const NetSpec& spec,
                      const Eigen::VectorXd& input);

// Heads missing from head_grads contribute zero. Gradients accumulate into
// params; the returned matrix is dL/d(inputs).
Eigen::MatrixXd Backward(NetParams& params, const NetSpec& spec,
                         const ForwardCache& cache,
                         const std::map<std::string, Eigen::MatrixXd>&
                             head_grads);

// One bias-corrected Adam update over the given layers; zeroes gradients.
// Throws DivergenceError (before touching any parameter) when a gradient
// is non-finite.
void AdamStep(std::span<Dense* const> layers, std::int64_t& step,
              double learning_rate, const AdamConfig& config = {});
void AdamStep(NetParams& params, double learning_rate,
              const AdamConfig& config = {});

void ZeroGrad(NetParams& params);
std::vector<Dense*> Layers(NetParams& params);

}  // namespace ecw::nnet

#endif  // ECW_NNET_NET_H_
