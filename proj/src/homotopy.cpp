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
#include <cmath>

#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"
#include "sublevel/training.hpp"

namespace sublevel {
namespace {

struct PieceWorst {
  double lambda = 0.0;
  double loss = -INFINITY;
};

double sampled_max(const NetworkSpec& spec, const DataSet& data,
                   const Theta& shape, const std::vector<Vector>& knots,
                   int samples, std::vector<PieceWorst>* worst) {
  double global = -INFINITY;
  if (worst) worst->assign(knots.size() - 1, {});
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    for (int s = 0; s < samples; ++s) {
      double t = static_cast<double>(s) / static_cast<double>(samples - 1);
      Vector v = (1.0 - t) * knots[i] + t * knots[i + 1];
      double value = loss(spec, shape.unflatten(v), data);
      if (!std::isfinite(value)) value = INFINITY;
      if (worst && value > (*worst)[i].loss) (*worst)[i] = {t, value};
      global = std::max(global, value);
    }
  }
  return global;
}

}  // namespace

HomotopyResult optimize_knot_path(const NetworkSpec& spec, const DataSet& data,
                                  const Theta& a, const Theta& b,
                                  double target,
                                  const HomotopyOptions& options) {
  validate_theta(spec, a);
  validate_theta(spec, b);
  require(options.knots >= 0 && options.samples_per_piece >= 2 &&
              options.max_iterations >= 0 && options.step > 0.0,
          ErrorCode::kInvalidArgument, "invalid homotopy options");
  const int pieces = options.knots + 1;
  std::vector<Vector> knots;
  Vector va = a.flatten();
  Vector vb = b.flatten();
  for (int i = 0; i <= pieces; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(pieces);
    knots.push_back(i == 0 ? va : i == pieces ? vb : Vector((1.0 - t) * va + t * vb));
  }

  HomotopyResult result;
  std::vector<PieceWorst> worst;
  double current = sampled_max(spec, data, a, knots, options.samples_per_piece, &worst);
  double step = options.step;
  int it = 0;
  for (; it < options.max_iterations && current > target && step > 1e-14; ++it) {
    std::vector<Vector> grads(knots.size(), Vector::Zero(va.size()));
    for (std::size_t i = 0; i < worst.size(); ++i) {
      if (worst[i].loss <= target) continue;
      double t = worst[i].lambda;
      Vector at = (1.0 - t) * knots[i] + t * knots[i + 1];
      Vector g = loss_gradient(spec, a.unflatten(at), data).gradient.flatten();
      grads[i] += (1.0 - t) * g;
      grads[i + 1] += t * g;
    }
    std::vector<Vector> trial = knots;
    for (std::size_t i = 1; i + 1 < trial.size(); ++i) trial[i] -= step * grads[i];
    std::vector<PieceWorst> trial_worst;
    double value = sampled_max(spec, data, a, trial, options.samples_per_piece,
                               &trial_worst);
    if (value < current) {
      knots = std::move(trial);
      worst = std::move(trial_worst);
      current = value;
      step *= 1.2;
    } else {
      step *= 0.5;
    }
  }

  result.iterations = it;
  result.max_loss = current;
  result.reached_target = current <= target;
  for (const Vector& v : knots) result.knots.push_back(a.unflatten(v));
  result.knots.front() = a;
  result.knots.back() = b;
  return result;
}

ParamPath knots_to_path(const std::vector<Theta>& knots) {
  require(knots.size() >= 2, ErrorCode::kInvalidArgument,
          "a knot path needs at least two knots");
  ParamPath path(Segment::linear(knots[0], knots[1], false));
  for (std::size_t i = 2; i < knots.size(); ++i) {
    path.append(Segment::linear(knots[i - 1], knots[i], false));
  }
  return path;
}

}  // namespace sublevel
