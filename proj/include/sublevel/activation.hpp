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

#include <Eigen/Dense>

namespace sublevel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Strictly increasing, surjective, continuous piecewise-linear activation.
///
/// The function is pinned by sigma(0) = 0 and slope slopes[i] on the i-th
/// interval cut out by the sorted breakpoints (slopes.size() ==
/// breakpoints.size() + 1). Derivatives at a breakpoint are taken from the
/// right branch.
class Activation {
 public:
  enum class Kind { kLeakyRelu, kPiecewiseLinear };

  static Activation leaky_relu(double slope = 0.5);
  static Activation piecewise_linear(std::vector<double> breakpoints,
                                     std::vector<double> slopes);

  Kind kind() const { return kind_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& slopes() const { return slopes_; }
  /// Negative-side slope of a leaky ReLU; meaningless for other kinds.
  double leaky_slope() const { return slopes_.front(); }

  double operator()(double x) const;
  double derivative(double x) const;
  double inverse(double y) const;

  Matrix apply(const Matrix& m) const;
  Matrix apply_inverse(const Matrix& m) const;
  Matrix apply_derivative(const Matrix& m) const;

  bool operator==(const Activation&) const = default;

 private:
  Activation(Kind kind, std::vector<double> breakpoints,
             std::vector<double> slopes);

  Kind kind_;
  std::vector<double> breakpoints_;
  std::vector<double> slopes_;
  std::vector<double> knot_values_;  // sigma(breakpoints_[i])
};

}  // namespace sublevel
