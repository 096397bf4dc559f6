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

#include "sublevel/activation.hpp"

namespace sublevel {

/// Numerical tolerances shared by the path constructions.
struct Tolerances {
  double rank_tol_rel = 1e-10;
  double feas_tol = 1e-8;
  double inv_tol = 1e-8;
  double verify_tol = 1e-6;
};

struct RankDecision {
  Index rank = 0;
  std::vector<double> singular_values;
  double tol_used = 0.0;
};

/// Rank by singular-value thresholding at
/// tol_rel * sigma_max * max(rows, cols), unless abs_tol >= 0 overrides it.
RankDecision numeric_rank(const Matrix& m, double tol_rel = 1e-10,
                          double abs_tol = -1.0);

/// Columns (or rows) selected from a matrix.
using IndexList = std::vector<Index>;

Matrix select_columns(const Matrix& m, const IndexList& cols);
Matrix select_rows(const Matrix& m, const IndexList& rows);

/// E with F(:, dependent) ~= F(:, basis) E in the least-squares sense.
/// Throws InfeasibleError when the residual exceeds feas_tol * ||F||_F.
/// basis and dependent must be disjoint; they need not cover every column.
Matrix span_coefficients(const Matrix& F, const IndexList& basis,
                         const IndexList& dependent, double feas_tol = 1e-8);

/// W with F W = Z for full-column-rank F. Throws InfeasibleError when
/// ||F W - Z||_F > feas_tol * ||Z||_F.
Matrix exact_solve_right(const Matrix& F, const Matrix& Z,
                         double feas_tol = 1e-8, double rank_tol_rel = 1e-10);

/// Sign of det(M) from a partially pivoted LU; 0 when
/// |det M| <= degeneracy_tol * ||M||_F^n.
int det_sign(const Matrix& M, double degeneracy_tol = 1e-12);

/// Moore-Penrose pseudo-inverse via complete orthogonal decomposition.
Matrix pseudo_inverse(const Matrix& m, double rank_tol_rel = 1e-10);

/// Greedy left-to-right maximal independent column set, visiting columns
/// in the given order (identity order if empty).
IndexList independent_columns(const Matrix& F, double rank_tol_rel = 1e-10,
                              const IndexList& order = {});

}  // namespace sublevel
