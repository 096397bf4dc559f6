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

#include <cstdint>
#include <functional>
#include <vector>

#include "sublevel/activation.hpp"

namespace sublevel {

struct FalsifyOptions {
  int p_max = 3;
  int trials = 30;
  std::uint64_t seed = 0;
  double grid_half_width = 4.0;
  int grid_points = 801;
  /// Shifts satisfy |a_i| >= min_shift and |a_i - a_j| >= min_shift.
  double min_shift = 0.5;
  int local_iterations = 400;
};

struct FalsifyReport {
  /// Smallest normalized grid residual found for p = 1..p_max.
  std::vector<double> best_residual;
  std::vector<std::vector<double>> best_shifts;
  double min_residual = 0.0;
  /// min_residual > 1e-3.
  bool consistent = false;
  /// min_residual < 1e-8.
  bool violated = false;
};

/// Searches for shifts a_i and weights lambda_i with
/// target(x) ~= sum_i lambda_i basis(x - a_i) on a uniform grid. Weights
/// come from least squares; shifts from random starts, kink-matching
/// candidates and pattern search.
FalsifyReport shifted_fit_search(const Activation& basis,
                                 const std::function<double(double)>& target,
                                 const FalsifyOptions& options = {});

/// The same search with the activation as its own target: a residual far
/// from zero is consistent with no shifted combination reproducing it.
FalsifyReport a2_falsify(const Activation& activation,
                         const FalsifyOptions& options = {});

}  // namespace sublevel
