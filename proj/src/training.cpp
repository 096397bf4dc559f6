// Copyright 2026 The sublevel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sublevel/training.hpp"

#include <cmath>

#include "sublevel/error.hpp"

namespace sublevel {

LossGradient loss_gradient(const NetworkSpec& spec, const Theta& theta,
                           const DataSet& data) {
  validate_theta(spec, theta);
  const std::size_t depth = theta.depth();
  const Activation& act = spec.activation();

  std::vector<Matrix> feats{data.X()};
  std::vector<Matrix> pres;
  for (std::size_t l = 0; l + 1 < depth; ++l) {
    Matrix pre = feats.back() * theta.layers[l].W;
    pre.rowwise() += theta.layers[l].b.transpose();
    feats.push_back(act.apply(pre));
    pres.push_back(std::move(pre));
  }
  Matrix out = feats.back() * theta.layers.back().W;

  LossGradient result;
  result.value = spec.loss().value(out, data.Y());
  result.gradient = theta;

  Matrix delta = spec.loss().gradient(out, data.Y());
  result.gradient.layers.back().W = feats[depth - 1].transpose() * delta;
  Matrix upstream = delta * theta.layers.back().W.transpose();
  for (std::size_t l = depth - 1; l-- > 0;) {
    Matrix d_pre = upstream.cwiseProduct(act.apply_derivative(pres[l]));
    result.gradient.layers[l].W = feats[l].transpose() * d_pre;
    result.gradient.layers[l].b = d_pre.colwise().sum().transpose();
    if (l > 0) upstream = d_pre * theta.layers[l].W.transpose();
  }
  return result;
}

TrainResult train_gradient_descent(const NetworkSpec& spec, Theta init,
                                   const DataSet& data,
                                   const TrainOptions& options) {
  require(options.steps >= 0, ErrorCode::kInvalidArgument,
          "training steps must be >= 0");
  require(options.learning_rate > 0.0, ErrorCode::kInvalidArgument,
          "learning rate must be positive");
  spec.loss().validate_targets(data.Y());
  TrainResult result{std::move(init), 0.0, {}};
  for (int step = 0; step < options.steps; ++step) {
    LossGradient g = loss_gradient(spec, result.theta, data);
    if (!std::isfinite(g.value)) {
      fail(ErrorCode::kDiverged,
           "training diverged at step " + std::to_string(step) +
               " (non-finite loss); try a smaller learning rate");
    }
    if (options.record_every > 0 && step % options.record_every == 0) {
      result.history.push_back(g.value);
    }
    for (std::size_t l = 0; l < result.theta.depth(); ++l) {
      result.theta.layers[l].W -= options.learning_rate * g.gradient.layers[l].W;
      result.theta.layers[l].b -= options.learning_rate * g.gradient.layers[l].b;
    }
    if (!result.theta.flatten().allFinite()) {
      fail(ErrorCode::kDiverged,
           "training diverged at step " + std::to_string(step) +
               " (non-finite parameters); try a smaller learning rate");
    }
  }
  result.final_loss = loss(spec, result.theta, data);
  require(std::isfinite(result.final_loss), ErrorCode::kDiverged,
          "training diverged (non-finite final loss); try a smaller learning rate");
  return result;
}

}  // namespace sublevel
