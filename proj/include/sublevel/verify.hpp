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

#include <iosfwd>
#include <utility>
#include <vector>

#include "sublevel/linalg.hpp"
#include "sublevel/network.hpp"
#include "sublevel/path.hpp"

namespace sublevel {

struct VerifyOptions {
  /// Uniform samples per segment, endpoints included.
  int samples_per_segment = 200;
  double verify_tol = 1e-6;
  double inv_tol = 1e-8;
  double endpoint_tol = 1e-9;
};

struct PathReport {
  double max_loss = 0.0;
  double bound = 0.0;
  int n_samples = 0;
  /// Sup-norm distance of the path ends from the requested endpoints.
  std::pair<double, double> endpoint_residuals{0.0, 0.0};
  /// Largest sup-norm gap between consecutive segments.
  double max_junction_gap = 0.0;
  /// Relative output drift per segment; judged only where preserving.
  std::vector<double> per_segment_invariance;
  std::vector<bool> output_preserving;
  std::vector<double> per_segment_max_loss;
  bool continuity_ok = true;
  bool passed = false;
};

/// Relative output drift ||A - B||_F / max(1, ||B||_F).
double output_drift(const Matrix& a, const Matrix& reference);

/// Samples every segment and checks the sublevel bound, endpoints,
/// chaining, output invariance of preserving segments and continuity.
PathReport verify_path(const NetworkSpec& spec, const DataSet& data,
                       const ParamPath& path, const Theta& requested_start,
                       const Theta& requested_end, double alpha,
                       const VerifyOptions& options = {});
PathReport verify_path(const NetworkSpec& spec, const DataSet& data,
                       const ParamPath& path, double alpha,
                       const VerifyOptions& options = {});

/// CSV with header segment_index,lambda,loss,param_l2_norm,output_drift;
/// drift is measured against each segment's start.
void write_trace_csv(std::ostream& os, const NetworkSpec& spec,
                     const DataSet& data, const ParamPath& path,
                     int samples_per_segment);

/// "%.17g".
std::string format_double(double v);

}  // namespace sublevel
