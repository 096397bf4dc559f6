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

#include "sublevel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sublevel/error.hpp"

namespace sublevel {

RankDecision numeric_rank(const Matrix& m, double tol_rel, double abs_tol) {
  require(m.allFinite(), ErrorCode::kInvalidArgument,
          "numeric_rank: matrix has non-finite entries");
  RankDecision out;
  if (m.size() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  out.singular_values.assign(s.data(), s.data() + s.size());
  double smax = s.size() > 0 ? s(0) : 0.0;
  out.tol_used = abs_tol >= 0.0
                     ? abs_tol
                     : tol_rel * smax *
                           static_cast<double>(std::max(m.rows(), m.cols()));
  for (double v : out.singular_values) out.rank += v > out.tol_used;
  return out;
}

Matrix select_columns(const Matrix& m, const IndexList& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    require(cols[i] >= 0 && cols[i] < m.cols(), ErrorCode::kInvalidArgument,
            "column index out of range");
    out.col(static_cast<Index>(i)) = m.col(cols[i]);
  }
  return out;
}

Matrix select_rows(const Matrix& m, const IndexList& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < m.rows(), ErrorCode::kInvalidArgument,
            "row index out of range");
    out.row(static_cast<Index>(i)) = m.row(rows[i]);
  }
  return out;
}

Matrix span_coefficients(const Matrix& F, const IndexList& basis,
                         const IndexList& dependent, double feas_tol) {
  std::vector<bool> seen(static_cast<std::size_t>(F.cols()), false);
  for (const IndexList* set : {&basis, &dependent}) {
    for (Index c : *set) {
      require(c >= 0 && c < F.cols(), ErrorCode::kInvalidArgument,
              "span_coefficients: index out of range");
      require(!seen[static_cast<std::size_t>(c)], ErrorCode::kInvalidArgument,
              "span_coefficients: index sets must be disjoint");
      seen[static_cast<std::size_t>(c)] = true;
    }
  }
  const auto nb = static_cast<Index>(basis.size());
  const auto nd = static_cast<Index>(dependent.size());
  if (nd == 0) return Matrix::Zero(nb, 0);
  Matrix B = select_columns(F, basis);
  Matrix D = select_columns(F, dependent);
  Matrix E = nb == 0 ? Matrix::Zero(0, nd)
                     : Matrix(B.completeOrthogonalDecomposition().solve(D));
  double residual = (D - B * E).norm();
  double bound = feas_tol * F.norm();
  if (!(residual <= bound)) {
    throw InfeasibleError(
        "span_coefficients: columns are not in the span of the basis "
        "(residual " + std::to_string(residual) + ")",
        residual);
  }
  return E;
}

Matrix exact_solve_right(const Matrix& F, const Matrix& Z, double feas_tol,
                         double rank_tol_rel) {
  require(F.rows() == Z.rows(), ErrorCode::kDimensionMismatch,
          "exact_solve_right: F and Z row counts differ");
  require(numeric_rank(F, rank_tol_rel).rank == F.cols(),
          ErrorCode::kPrecondition,
          "exact_solve_right: F must have full column rank");
  Matrix W = F.colPivHouseholderQr().solve(Z);
  double residual = (F * W - Z).norm();
  if (!(residual <= feas_tol * Z.norm())) {
    throw InfeasibleError("exact_solve_right: right-hand side is not in the "
                          "column space (residual " +
                              std::to_string(residual) + ")",
                          residual);
  }
  return W;
}

int det_sign(const Matrix& M, double degeneracy_tol) {
  require(M.rows() == M.cols(), ErrorCode::kDimensionMismatch,
          "det_sign: matrix must be square");
  const Index n = M.rows();
  if (n == 0) return 1;
  Eigen::PartialPivLU<Matrix> lu(M);
  const Matrix& U = lu.matrixLU();
  int sign = lu.permutationP().determinant();
  double log_abs = 0.0;
  for (Index i = 0; i < n; ++i) {
    double d = U(i, i);
    if (d == 0.0 || !std::isfinite(d)) return 0;
    if (d < 0.0) sign = -sign;
    log_abs += std::log(std::abs(d));
  }
  double scale = M.norm();
  if (scale == 0.0) return 0;
  double log_floor =
      std::log(degeneracy_tol) + static_cast<double>(n) * std::log(scale);
  return log_abs <= log_floor ? 0 : sign;
}

Matrix pseudo_inverse(const Matrix& m, double rank_tol_rel) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m);
  // Threshold relative to the largest |R| diagonal entry, as Eigen expects.
  cod.setThreshold(rank_tol_rel * static_cast<double>(std::max(m.rows(), m.cols())));
  return cod.pseudoInverse();
}

IndexList independent_columns(const Matrix& F, double rank_tol_rel,
                              const IndexList& order) {
  IndexList visit = order;
  if (visit.empty()) {
    visit.resize(static_cast<std::size_t>(F.cols()));
    std::iota(visit.begin(), visit.end(), Index{0});
  }
  // Absolute threshold from the full matrix so the decision does not drift
  // as the candidate set grows.
  RankDecision full = numeric_rank(F, rank_tol_rel);
  IndexList chosen;
  for (Index c : visit) {
    IndexList trial = chosen;
    trial.push_back(c);
    if (numeric_rank(select_columns(F, trial), rank_tol_rel, full.tol_used)
            .rank == static_cast<Index>(trial.size())) {
      chosen = std::move(trial);
    }
    if (static_cast<Index>(chosen.size()) == full.rank) break;
  }
  return chosen;
}

}  // namespace sublevel
