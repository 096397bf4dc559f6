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
#include <numeric>
#include <vector>

#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"

namespace sublevel {
namespace {

IndexList complement(const IndexList& chosen, Index n) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (Index c : chosen) in[static_cast<std::size_t>(c)] = true;
  IndexList out;
  for (Index c = 0; c < n; ++c) {
    if (!in[static_cast<std::size_t>(c)]) out.push_back(c);
  }
  return out;
}

// Fresh incoming weights for one neuron. The kink is placed strictly
// between two adjacent projected samples, so on the data the new feature is
// a hinge that no affine function reproduces.
void redraw_neuron(Layer& first, Index neuron, const Matrix& X, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector w = Vector::NullaryExpr(first.W.rows(), [&]() { return normal(rng); });
  Vector z = X * w;
  std::vector<double> sorted(z.data(), z.data() + z.size());
  std::sort(sorted.begin(), sorted.end());
  double kink = sorted.front() - 1.0;
  if (sorted.size() > 1) {
    std::size_t gap = std::uniform_int_distribution<std::size_t>(0, sorted.size() - 2)(rng);
    double u = std::uniform_real_distribution<double>(0.25, 0.75)(rng);
    kink = sorted[gap] + u * (sorted[gap + 1] - sorted[gap]);
  }
  first.W.col(neuron) = w;
  first.b(neuron) = -kink;
}

}  // namespace

RestoreResult restore_full_rank(const NetworkSpec& spec, const Matrix& X,
                                const Theta& theta, Rng& rng,
                                const RestoreOptions& options) {
  require(spec.depth() >= 2, ErrorCode::kPrecondition,
          "restore_full_rank needs a hidden layer (L >= 2)");
  validate_theta(spec, theta);
  const Index n_samples = X.rows();
  const Index width = spec.width(1);
  require(width >= n_samples, ErrorCode::kPrecondition,
          "restore_full_rank needs n_1 >= N (n_1 = " + std::to_string(width) +
              ", N = " + std::to_string(n_samples) + ")");
  require(check_distinct_rows(X, 0.0), ErrorCode::kPrecondition,
          "restore_full_rank needs pairwise distinct input rows");
  const Tolerances& tol = options.tol;

  Matrix F = hidden_features(spec, theta, X, 1);
  if (numeric_rank(F, tol.rank_tol_rel).rank == n_samples) {
    return {ParamPath(Segment::constant(theta)), n_samples, 0};
  }

  // Silencing neuron j moves the output by (its residual against the basis)
  // times (its outgoing row), so neurons with heavy outgoing rows are kept.
  IndexList by_weight(static_cast<std::size_t>(width));
  std::iota(by_weight.begin(), by_weight.end(), Index{0});
  const Matrix& out = theta.layers[1].W;
  std::stable_sort(by_weight.begin(), by_weight.end(), [&](Index x, Index y) {
    return out.row(x).norm() > out.row(y).norm();
  });
  IndexList basis = independent_columns(F, tol.rank_tol_rel, by_weight);
  std::sort(basis.begin(), basis.end());
  IndexList redundant = complement(basis, width);
  MatrixCurve silence = zero_dependent_rows(F, theta.layers[1].W, basis,
                                            redundant, tol.feas_tol);
  ParamPath path(Segment::block_curve(theta, 1, std::move(silence)));
  const Theta silenced = path.end();

  // Greedy: each redundant neuron keeps the first of a few draws that
  // raises the rank; a pass that ends short of N starts over.
  constexpr int kTriesPerNeuron = 16;
  for (int draw = 1; draw <= options.max_retries; ++draw) {
    Theta candidate = silenced;
    Index rank = numeric_rank(hidden_features(spec, candidate, X, 1),
                              tol.rank_tol_rel).rank;
    for (Index j : redundant) {
      if (rank == n_samples) {
        redraw_neuron(candidate.layers[0], j, X, rng);
        continue;
      }
      for (int t = 0; t < kTriesPerNeuron; ++t) {
        redraw_neuron(candidate.layers[0], j, X, rng);
        Index r = numeric_rank(hidden_features(spec, candidate, X, 1),
                               tol.rank_tol_rel).rank;
        if (r > rank) {
          rank = r;
          break;
        }
      }
    }
    if (rank == n_samples) {
      path.append(Segment::linear(silenced, candidate, true));
      return {std::move(path), rank, draw};
    }
  }
  fail(ErrorCode::kRankNotRestored,
       "first-layer rank not restored after " +
           std::to_string(options.max_retries) + " draws");
}

}  // namespace sublevel
