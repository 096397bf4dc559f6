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

#include "sublevel/activation.hpp"

#include <algorithm>
#include <cmath>

#include "sublevel/error.hpp"

namespace sublevel {

Activation Activation::leaky_relu(double slope) {
  require(std::isfinite(slope) && slope > 0.0 && slope < 1.0,
          ErrorCode::kInvalidArgument,
          "leaky ReLU slope must lie in (0, 1), got " + std::to_string(slope));
  return Activation(Kind::kLeakyRelu, {0.0}, {slope, 1.0});
}

Activation Activation::piecewise_linear(std::vector<double> breakpoints,
                                        std::vector<double> slopes) {
  return Activation(Kind::kPiecewiseLinear, std::move(breakpoints),
                    std::move(slopes));
}

Activation::Activation(Kind kind, std::vector<double> breakpoints,
                       std::vector<double> slopes)
    : kind_(kind),
      breakpoints_(std::move(breakpoints)),
      slopes_(std::move(slopes)) {
  require(!breakpoints_.empty(), ErrorCode::kInvalidArgument,
          "activation needs at least one breakpoint");
  require(slopes_.size() == breakpoints_.size() + 1,
          ErrorCode::kInvalidArgument,
          "activation needs exactly one more slope than breakpoints");
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    require(std::isfinite(breakpoints_[i]), ErrorCode::kInvalidArgument,
            "activation breakpoints must be finite");
    if (i > 0) {
      require(breakpoints_[i] > breakpoints_[i - 1],
              ErrorCode::kInvalidArgument,
              "activation breakpoints must be strictly increasing");
    }
  }
  for (double s : slopes_) {
    // Positive slopes everywhere give strict monotonicity; positive outer
    // slopes give surjectivity.
    require(std::isfinite(s) && s > 0.0, ErrorCode::kInvalidArgument,
            "activation slopes must be finite and positive");
  }
  bool affine = std::all_of(slopes_.begin(), slopes_.end(),
                            [&](double s) { return s == slopes_.front(); });
  require(!affine, ErrorCode::kInvalidArgument,
          "affine activations are not admissible (need two distinct slopes)");

  // sigma(0) = 0; integrate outwards from the interval holding 0.
  const std::size_t m = breakpoints_.size();
  knot_values_.assign(m, 0.0);
  const auto j0 = static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), 0.0) -
      breakpoints_.begin());
  for (std::size_t i = j0; i < m; ++i) {
    double prev_t = (i == j0) ? 0.0 : breakpoints_[i - 1];
    double prev_v = (i == j0) ? 0.0 : knot_values_[i - 1];
    knot_values_[i] = prev_v + slopes_[i] * (breakpoints_[i] - prev_t);
  }
  for (std::size_t i = j0; i-- > 0;) {
    double next_t = (i + 1 == j0) ? 0.0 : breakpoints_[i + 1];
    double next_v = (i + 1 == j0) ? 0.0 : knot_values_[i + 1];
    knot_values_[i] = next_v - slopes_[i + 1] * (next_t - breakpoints_[i]);
  }
}

double Activation::operator()(double x) const {
  if (kind_ == Kind::kLeakyRelu) return x >= 0.0 ? x : slopes_[0] * x;
  const auto idx = static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
      breakpoints_.begin());
  if (idx == 0) return knot_values_[0] + slopes_[0] * (x - breakpoints_[0]);
  return knot_values_[idx - 1] + slopes_[idx] * (x - breakpoints_[idx - 1]);
}

double Activation::derivative(double x) const {
  if (kind_ == Kind::kLeakyRelu) return x >= 0.0 ? 1.0 : slopes_[0];
  const auto idx = static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
      breakpoints_.begin());
  return slopes_[idx];
}

double Activation::inverse(double y) const {
  if (kind_ == Kind::kLeakyRelu) return y >= 0.0 ? y : y / slopes_[0];
  const auto idx = static_cast<std::size_t>(
      std::upper_bound(knot_values_.begin(), knot_values_.end(), y) -
      knot_values_.begin());
  if (idx == 0) return breakpoints_[0] + (y - knot_values_[0]) / slopes_[0];
  return breakpoints_[idx - 1] + (y - knot_values_[idx - 1]) / slopes_[idx];
}

Matrix Activation::apply(const Matrix& m) const {
  return m.unaryExpr([this](double x) { return (*this)(x); });
}

Matrix Activation::apply_inverse(const Matrix& m) const {
  return m.unaryExpr([this](double y) { return inverse(y); });
}

Matrix Activation::apply_derivative(const Matrix& m) const {
  return m.unaryExpr([this](double x) { return derivative(x); });
}

}  // namespace sublevel
