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

#include <doctest.h>

#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"
#include "support.hpp"

using namespace sublevel;
using namespace sublevel::testing;

namespace {

const double kLambdas[] = {0.0, 0.25, 0.5, 0.75, 1.0};

bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("zero dependent rows example") {
  Matrix F(2, 3);
  F << 1, 0, 1, 0, 1, 1;
  Matrix W = Matrix::Identity(3, 3);
  MatrixCurve c = zero_dependent_rows(F, W, {0, 1}, {2});
  Matrix expect(3, 3);
  expect << 1, 0, 1, 0, 1, 1, 0, 0, 0;
  CHECK(same(c.at(1.0), expect));
  CHECK(same(c.at(0.0), W));
  for (double t : kLambdas) {
    CHECK((F * c.at(t) - F * W).norm() <= 1e-14);
  }
  // Direct check of the closed form at a quarter.
  Matrix q(3, 3);
  q << 1, 0, 0.25, 0, 1, 0.25, 0, 0, 0.75;
  CHECK((c.at(0.25) - q).norm() <= 1e-15);
}

TEST_CASE("zero dependent rows degenerate cases") {
  Rng rng(51);
  Matrix F = gaussian(3, 3, rng);
  Matrix W = gaussian(3, 2, rng);
  MatrixCurve c = zero_dependent_rows(F, W, {0, 1, 2}, {});
  for (double t : kLambdas) CHECK(same(c.at(t), W));

  Matrix F2(2, 3);
  F2 << 1, 0, 1, 0, 1, 1;
  Matrix W2 = gaussian(3, 2, rng);
  W2.row(2).setZero();
  MatrixCurve c2 = zero_dependent_rows(F2, W2, {0, 1}, {2});
  for (double t : kLambdas) CHECK(same(c2.at(t), W2));
}

TEST_CASE("zero dependent rows rejects infeasible partitions") {
  try {
    zero_dependent_rows(Matrix::Identity(2, 2), Matrix::Ones(2, 1), {0}, {1},
                        Matrix::Zero(1, 1));
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(e.residual() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(zero_dependent_rows(Matrix::Identity(2, 2), Matrix::Ones(3, 1), {0}, {1}),
                  Error);
}

TEST_CASE("transfer neuron example") {
  Matrix F(1, 2);
  F << 1, 1;
  Matrix W(2, 1);
  W << 2, 0;
  // j = second neuron, k = first neuron.
  MatrixCurve c = transfer_neuron(F, W, 1, 0);
  Matrix end(2, 1);
  end << 0, 2;
  CHECK(same(c.at(1.0), end));
  CHECK(same(c.at(0.0), W));
  Matrix half(2, 1);
  half << 1, 1;
  CHECK(same(c.at(0.5), half));
  for (double t : kLambdas) CHECK((F * c.at(t))(0, 0) == 2.0);
}

TEST_CASE("transfer neuron preconditions") {
  Matrix F(1, 2);
  F << 1, 1;
  Matrix W(2, 1);
  W << 2, 1;
  CHECK_THROWS_AS(transfer_neuron(F, W, 1, 0), Error);  // row j not zero
  Matrix G(1, 2);
  G << 1, 2;
  Matrix V(2, 1);
  V << 2, 0;
  CHECK_THROWS_AS(transfer_neuron(G, V, 1, 0), Error);  // columns differ
  CHECK_THROWS_AS(transfer_neuron(F, V, 0, 0), Error);
  CHECK_THROWS_AS(transfer_neuron(F, V, 2, 0), Error);
  Matrix Z = Matrix::Zero(2, 1);
  MatrixCurve c = transfer_neuron(F, Z, 1, 0);
  for (double t : kLambdas) CHECK(same(c.at(t), Z));
}

TEST_CASE("silencing and transfer curves preserve F W on random instances") {
  Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    Index N = uniform_int(rng, 1, 8);
    Index n = uniform_int(rng, 2, 12);
    Index p = uniform_int(rng, 1, 4);
    Index r = uniform_int(rng, 1, std::min(N, n - 1));
    // Columns r.. of F are random combinations of the first r.
    Matrix B = gaussian(N, r, rng);
    Matrix F(N, n);
    F << B, B * gaussian(r, n - r, rng);
    Matrix W = gaussian(n, p, rng);
    IndexList basis = iota(r), dependent;
    for (Index i = r; i < n; ++i) dependent.push_back(i);
    MatrixCurve c = zero_dependent_rows(F, W, basis, dependent);
    CHECK(same(c.at(0.0), W));
    CHECK(c.at(1.0).bottomRows(n - r).isZero(0.0));
    Matrix FW = F * W;
    for (int i = 0; i <= 20; ++i) {
      double t = i / 20.0;
      CHECK((F * c.at(t) - FW).norm() <= 1e-10 * std::max(1.0, FW.norm()));
    }

    Matrix F2 = F;
    Index k = uniform_int(rng, 0, n - 1);
    Index j = (k + 1 + uniform_int(rng, 0, n - 2)) % n;
    F2.col(j) = F2.col(k);
    Matrix W2 = W;
    W2.row(j).setZero();
    MatrixCurve t = transfer_neuron(F2, W2, j, k);
    CHECK(t.at(1.0).row(k).isZero(0.0));
    CHECK(same(Matrix(t.at(1.0).row(j)), Matrix(W2.row(k))));
    Matrix F2W = F2 * W2;
    for (int i = 0; i <= 20; ++i) {
      CHECK((F2 * t.at(i / 20.0) - F2W).norm() <= 1e-10 * std::max(1.0, F2W.norm()));
    }
  }
}
