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

#include <algorithm>

#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"

namespace sublevel {

ConnectResult connect_sublevel(const NetworkSpec& spec, const DataSet& data,
                               const Theta& theta, const Theta& theta_prime,
                               double alpha, const ConnectOptions& options) {
  require(spec.depth() >= 2, ErrorCode::kPrecondition,
          "connect_sublevel needs L >= 2");
  validate_theta(spec, theta);
  validate_theta(spec, theta_prime);
  const Index n_samples = data.samples();
  require(spec.width(1) >= n_samples + 1, ErrorCode::kPrecondition,
          "n_1 must be >= N+1 (n_1 = " + std::to_string(spec.width(1)) +
              ", N = " + std::to_string(n_samples) + ")");
  require(spec.has_pyramidal_tail(), ErrorCode::kPrecondition,
          "widths after the first hidden layer must strictly decrease");
  double la = loss(spec, theta, data);
  double lb = loss(spec, theta_prime, data);
  require(la <= alpha && lb <= alpha, ErrorCode::kPrecondition,
          "alpha " + std::to_string(alpha) + " is below an endpoint loss (" +
              std::to_string(std::max(la, lb)) + ")");

  ConnectResult result{ParamPath(Segment::constant(theta)), SubnetRegime::kAuto,
                       {}, {}};
  if (exactly_equal(theta, theta_prime)) {
    result.stage_sizes = {1, 0, 0, 0};
    return result;
  }

  Rng rng(options.seed);
  RestoreOptions ropt{options.tol, options.max_retries};
  RestoreResult start = restore_full_rank(spec, data.X(), theta, rng, ropt);
  RestoreResult finish = restore_full_rank(spec, data.X(), theta_prime, rng, ropt);
  const Theta& target = finish.path.end();

  // Independent target neurons first, the rest in index order.
  Matrix F_target = hidden_features(spec, target, data.X(), 1);
  IndexList order = independent_columns(F_target, options.tol.rank_tol_rel);
  require(static_cast<Index>(order.size()) == n_samples, ErrorCode::kInternal,
          "restored target features lost rank");
  for (Index c = 0; c < spec.width(1); ++c) {
    if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
  }

  ParamPath align = align_first_layer(spec, data.X(), start.path.end(), target,
                                      order, options.tol);

  // The layers above the first see F_1 as their training data.
  NetworkSpec tail_spec = spec.tail(1);
  DataSet tail_data = DataSet::create(F_target, data.Y());
  Theta tail_a;
  Theta tail_b;
  tail_a.layers.assign(align.end().layers.begin() + 1, align.end().layers.end());
  tail_b.layers.assign(target.layers.begin() + 1, target.layers.end());
  SubnetOptions sopt = options.subnet;
  sopt.tol = options.tol;
  SubnetResult sub = subnet_connect(tail_spec, tail_data, tail_a, tail_b,
                                    alpha, sopt);

  std::vector<Layer> prefix{target.layers[0]};
  ParamPath path = start.path;
  path.append(align);
  for (const Segment& s : sub.path.segments()) {
    path.append(Segment::embedded(prefix, s));
  }
  path.append(finish.path.reversed());

  result.path = std::move(path);
  result.regime = sub.regime;
  result.order = std::move(order);
  result.stage_sizes = {start.path.size(), align.size(), sub.path.size(),
                        finish.path.size()};
  return result;
}

}  // namespace sublevel
