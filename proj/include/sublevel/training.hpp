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

#pragma once

#include <vector>

#include "sublevel/network.hpp"

namespace sublevel {

/// Loss and its gradient with respect to every parameter block.
struct LossGradient {
  double value = 0.0;
  Theta gradient;
};

/// Closed-form backprop; subgradients at kinks use the right branch.
LossGradient loss_gradient(const NetworkSpec& spec, const Theta& theta,
                           const DataSet& data);

struct TrainOptions {
  int steps = 5000;
  double learning_rate = 0.05;
  /// Record the loss every this many steps (0 disables).
  int record_every = 100;
};

struct TrainResult {
  Theta theta;
  double final_loss = 0.0;
  std::vector<double> history;
};

/// Full-batch gradient descent. Throws kDiverged on a non-finite loss.
TrainResult train_gradient_descent(const NetworkSpec& spec, Theta init,
                                   const DataSet& data,
                                   const TrainOptions& options);

}  // namespace sublevel
