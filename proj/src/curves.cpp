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

#include <cmath>

#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"

namespace sublevel {

MatrixCurve zero_dependent_rows(const Matrix& F, const Matrix& W,
                                const IndexList& basis,
                                const IndexList& dependent, const Matrix& E,
                                double feas_tol) {
  require(F.cols() == W.rows(), ErrorCode::kDimensionMismatch,
          "zero_dependent_rows: F has " + std::to_string(F.cols()) +
              " columns but W has " + std::to_string(W.rows()) + " rows");
  if (!dependent.empty()) {
    double residual =
        (select_columns(F, dependent) - select_columns(F, basis) * E).norm();
    if (!(residual <= feas_tol * F.norm())) {
      throw InfeasibleError(
          "zero_dependent_rows: dependent columns are not spanned by the "
          "basis (residual " + std::to_string(residual) + ")",
          residual);
    }
  }
  return MatrixCurve::zero_dependent_rows(W, basis, dependent, E);
}

MatrixCurve zero_dependent_rows(const Matrix& F, const Matrix& W,
                                const IndexList& basis,
                                const IndexList& dependent, double feas_tol) {
  Matrix E = span_coefficients(F, basis, dependent, feas_tol);
  return zero_dependent_rows(F, W, basis, dependent, E, feas_tol);
}

MatrixCurve transfer_neuron(const Matrix& F, const Matrix& W, Index j,
                            Index k, double tol) {
  require(F.cols() == W.rows(), ErrorCode::kDimensionMismatch,
          "transfer_neuron: F columns and W rows differ");
  require(j >= 0 && j < W.rows() && k >= 0 && k < W.rows(),
          ErrorCode::kInvalidArgument, "transfer_neuron: index out of range");
  require(j != k, ErrorCode::kInvalidArgument,
          "transfer_neuron: j and k must differ");
  double row = W.cols() == 0 ? 0.0 : W.row(j).cwiseAbs().maxCoeff();
  require(row <= tol, ErrorCode::kPrecondition,
          "transfer_neuron: outgoing weights of neuron " + std::to_string(j) +
              " are not zero (max " + std::to_string(row) + ")");
  double col = F.rows() == 0 ? 0.0 : (F.col(j) - F.col(k)).cwiseAbs().maxCoeff();
  require(col <= tol, ErrorCode::kPrecondition,
          "transfer_neuron: features of neurons " + std::to_string(j) +
              " and " + std::to_string(k) + " differ (max " +
              std::to_string(col) + ")");
  return MatrixCurve::transfer_neuron(W, j, k);
}

}  // namespace sublevel
