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
#include <string>
#include <utility>
#include <vector>

#include "sublevel/linalg.hpp"
#include "sublevel/network.hpp"
#include "sublevel/path.hpp"

namespace sublevel {

// ---------------------------------------------------------------------------
// Output-preserving curves on an (F, W) pair.

/// Curve on W with F c(lambda) = F W that zeroes the rows `dependent`.
/// Requires F(:, dependent) = F(:, basis) E to feas_tol * ||F||_F; throws
/// InfeasibleError (carrying the residual) otherwise.
MatrixCurve zero_dependent_rows(const Matrix& F, const Matrix& W,
                                const IndexList& basis,
                                const IndexList& dependent, const Matrix& E,
                                double feas_tol = 1e-8);
/// Same, computing E by least squares.
MatrixCurve zero_dependent_rows(const Matrix& F, const Matrix& W,
                                const IndexList& basis,
                                const IndexList& dependent,
                                double feas_tol = 1e-8);

/// Curve on W moving row k onto row j. Requires W(j,:) = 0 and
/// F(:,j) = F(:,k), both to within tol.
MatrixCurve transfer_neuron(const Matrix& F, const Matrix& W, Index j,
                            Index k, double tol = 1e-12);

// ---------------------------------------------------------------------------
// First-layer rank restoration.

struct RestoreOptions {
  Tolerances tol;
  int max_retries = 10;
};

struct RestoreResult {
  ParamPath path;
  Index achieved_rank = 0;
  int draws = 0;
};

/// Output-preserving path after which the first-layer features have
/// numeric rank N. Redundant neurons are silenced through their outgoing
/// weights, then their incoming weights are redrawn. Throws
/// kRankNotRestored if max_retries draws all fall short.
RestoreResult restore_full_rank(const NetworkSpec& spec, const Matrix& X,
                                const Theta& theta, Rng& rng,
                                const RestoreOptions& options = {});

// ---------------------------------------------------------------------------
// First-layer alignment.

/// Output-preserving path from `theta` to a point whose first layer
/// (W_1, b_1) equals the target's bit for bit. Neurons are processed in
/// `order` (identity if empty); the first N neurons in that order must have
/// linearly independent target features. Throws kNoDependentColumn if the
/// span search fails numerically.
ParamPath align_first_layer(const NetworkSpec& spec, const Matrix& X,
                            const Theta& theta, const Theta& target,
                            const IndexList& order = {},
                            const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Connection of the layers above the first one.

enum class SubnetRegime {
  kAuto,
  /// Depth-one subnetwork: straight segment in the output weights.
  kLastLayerLine,
  /// Deeper pyramidal subnetwork: canonical waypoint construction.
  kFeatureCanonical,
  /// Knot-path optimization, accepted only if verification passes.
  kHomotopy,
};

std::string regime_name(SubnetRegime regime);

struct HomotopyOptions {
  int knots = 8;
  int max_iterations = 2000;
  int samples_per_piece = 16;
  double step = 0.05;
};

struct SubnetOptions {
  Tolerances tol;
  SubnetRegime regime = SubnetRegime::kAuto;
  int verify_samples = 200;
  std::uint64_t canonical_seed = 0x5eed;
  HomotopyOptions homotopy;
};

struct SubnetResult {
  ParamPath path;
  SubnetRegime regime = SubnetRegime::kAuto;
  double max_loss = 0.0;
};

/// Path between two parameter tuples of a network fed with full-row-rank
/// data, staying in the alpha-sublevel set (verified by sampling). Throws
/// kHomotopyFailed when no regime produces a verified path; that outcome
/// says nothing about whether a path exists.
SubnetResult subnet_connect(const NetworkSpec& spec, const DataSet& data,
                            const Theta& a, const Theta& b, double alpha,
                            const SubnetOptions& options = {});

// ---------------------------------------------------------------------------
// Knot-path optimization.

struct HomotopyResult {
  std::vector<Theta> knots;
  double max_loss = 0.0;
  int iterations = 0;
  bool reached_target = false;
};

/// Moves the interior knots of a piecewise-linear path from a to b to
/// reduce the maximum sampled loss, stopping once it is <= target.
HomotopyResult optimize_knot_path(const NetworkSpec& spec, const DataSet& data,
                                  const Theta& a, const Theta& b,
                                  double target,
                                  const HomotopyOptions& options = {});

ParamPath knots_to_path(const std::vector<Theta>& knots);

// ---------------------------------------------------------------------------
// Full construction.

struct ConnectOptions {
  Tolerances tol;
  std::uint64_t seed = 0;
  int max_retries = 10;
  SubnetOptions subnet;
};

struct ConnectResult {
  ParamPath path;
  SubnetRegime regime = SubnetRegime::kAuto;
  /// Neuron processing order used for the first-layer alignment.
  IndexList order;
  /// Number of segments in each stage: restore start, align, subnet,
  /// restore end.
  std::vector<std::size_t> stage_sizes;
};

/// Path from theta to theta_prime inside the alpha-sublevel set of a
/// network with n_1 >= N + 1 and a pyramidal tail.
ConnectResult connect_sublevel(const NetworkSpec& spec, const DataSet& data,
                               const Theta& theta, const Theta& theta_prime,
                               double alpha,
                               const ConnectOptions& options = {});

}  // namespace sublevel
