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
#include <numeric>
#include <optional>

#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"

namespace sublevel {
namespace {

bool same_neuron(const Layer& a, const Layer& b, Index k) {
  return (a.W.col(k).array() == b.W.col(k).array()).all() && a.b(k) == b.b(k);
}

IndexList checked_order(const IndexList& order, Index n) {
  IndexList out = order;
  if (out.empty()) {
    out.resize(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), Index{0});
  }
  IndexList sorted = out;
  std::sort(sorted.begin(), sorted.end());
  bool permutation = static_cast<Index>(sorted.size()) == n;
  for (Index i = 0; permutation && i < n; ++i) {
    permutation = sorted[static_cast<std::size_t>(i)] == i;
  }
  require(permutation, ErrorCode::kInvalidArgument,
          "neuron order must be a permutation of the first-layer neurons");
  return out;
}

}  // namespace

ParamPath align_first_layer(const NetworkSpec& spec, const Matrix& X,
                            const Theta& theta, const Theta& target,
                            const IndexList& order_in, const Tolerances& tol) {
  require(spec.depth() >= 2, ErrorCode::kPrecondition,
          "align_first_layer needs L >= 2");
  validate_theta(spec, theta);
  validate_theta(spec, target);
  const Index n_samples = X.rows();
  const Index width = spec.width(1);
  require(width >= n_samples + 1, ErrorCode::kPrecondition,
          "align_first_layer needs n_1 >= N + 1");
  const IndexList order = checked_order(order_in, width);

  require(numeric_rank(hidden_features(spec, theta, X, 1), tol.rank_tol_rel)
                  .rank == n_samples,
          ErrorCode::kPrecondition,
          "align_first_layer needs rank(F_1) = N at the moving point");
  {
    IndexList lead(order.begin(), order.begin() + n_samples);
    Matrix lead_cols = select_columns(hidden_features(spec, target, X, 1), lead);
    require(numeric_rank(lead_cols, tol.rank_tol_rel).rank == n_samples,
            ErrorCode::kPrecondition,
            "the first N target neurons (in processing order) must have "
            "independent features");
  }

  std::optional<ParamPath> path;
  Theta current = theta;
  auto push = [&](Segment s) {
    if (path) {
      path->append(std::move(s));
    } else {
      path.emplace(std::move(s));
    }
    current = path->end();
  };
  auto outgoing_nonzero = [&](Index neuron) {
    return !current.layers[1].W.row(neuron).isZero(0.0);
  };

  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const Index k = order[pos];
    if (same_neuron(current.layers[0], target.layers[0], k)) continue;

    // Smallest position at or after pos whose feature column lies in the
    // span of all columns before it. A column that is only nearly in the
    // span is skipped when silencing it would move the output by more than
    // a small fraction of inv_tol.
    Matrix F = hidden_features(spec, current, X, 1);
    const double out_scale =
        std::max(1.0, network_output(spec, current, X).norm());
    std::optional<std::size_t> found;
    Matrix E;
    for (std::size_t q = pos; q < order.size() && !found; ++q) {
      IndexList basis(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(q));
      try {
        E = span_coefficients(F, basis, {order[q]}, tol.feas_tol);
      } catch (const InfeasibleError&) {
        continue;
      }
      Matrix residual = F.col(order[q]) - select_columns(F, basis) * E;
      double drift = (residual * current.layers[1].W.row(order[q])).norm();
      if (drift <= 0.01 * tol.inv_tol * out_scale) found = q;
    }
    if (!found) {
      fail(ErrorCode::kNoDependentColumn,
           "no dependent first-layer column at or after position " +
               std::to_string(pos) + "; rank tolerance too tight?");
    }
    const Index j = order[*found];
    IndexList basis(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(*found));

    if (outgoing_nonzero(j)) {
      push(Segment::block_curve(
          current, 1,
          zero_dependent_rows(F, current.layers[1].W, basis, {j}, E,
                              tol.feas_tol)));
    }
    if (j != k) {
      Theta copied = current;
      copied.layers[0].W.col(j) = current.layers[0].W.col(k);
      copied.layers[0].b(j) = current.layers[0].b(k);
      push(Segment::linear(current, copied, true));
      if (outgoing_nonzero(k)) {
        Matrix G = hidden_features(spec, current, X, 1);
        push(Segment::block_curve(
            current, 1, transfer_neuron(G, current.layers[1].W, j, k)));
      }
    }
    Theta placed = current;
    placed.layers[0].W.col(k) = target.layers[0].W.col(k);
    placed.layers[0].b(k) = target.layers[0].b(k);
    push(Segment::linear(current, placed, true));
  }

  if (!path) path.emplace(Segment::constant(theta));
  return std::move(*path);
}

}  // namespace sublevel
