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

#include <cmath>

#include "sublevel/error.hpp"
#include "sublevel/falsify.hpp"
#include "support.hpp"

using namespace sublevel;
using namespace sublevel::testing;

namespace {

// Grid least squares for fixed shifts, written independently of the
// library with normal equations.
double grid_residual(const Activation& basis, const std::function<double(double)>& target,
                     const std::vector<double>& shifts) {
  const int n = 801;
  Matrix A(n, static_cast<Index>(shifts.size()));
  Vector y(n);
  for (int k = 0; k < n; ++k) {
    double x = -4.0 + 8.0 * k / (n - 1);
    y(k) = target(x);
    for (std::size_t i = 0; i < shifts.size(); ++i) A(k, static_cast<Index>(i)) = basis(x - shifts[i]);
  }
  Vector lambda = (A.transpose() * A).ldlt().solve(A.transpose() * y);
  return (y - A * lambda).norm() / y.norm();
}

}  // namespace

TEST_CASE("leaky relu is not a shifted combination of itself") {
  Activation a = Activation::leaky_relu(0.5);
  FalsifyReport r = a2_falsify(a);
  REQUIRE(r.best_residual.size() == 3);
  CHECK(r.min_residual > 1e-3);
  CHECK(r.consistent);
  CHECK_FALSE(r.violated);
  // The reported residuals are reproduced by an independent fit.
  for (std::size_t p = 0; p < 3; ++p) {
    double check = grid_residual(a, [&](double x) { return a(x); }, r.best_shifts[p]);
    CHECK(check == doctest::Approx(r.best_residual[p]).epsilon(1e-6));
  }
}

TEST_CASE("a random piecewise-linear activation passes too") {
  Rng rng(111);
  Activation a = random_piecewise(rng);
  FalsifyOptions opt;
  opt.p_max = 2;
  opt.trials = 10;
  CHECK(a2_falsify(a, opt).consistent);
}

TEST_CASE("a constructed sum of shifted copies is flagged") {
  Activation base = Activation::leaky_relu(0.5);
  FalsifyReport r =
      shifted_fit_search(base, [&](double x) { return base(x - 1.0) + base(x + 1.0); });
  CHECK(r.min_residual < 1e-8);
  CHECK(r.violated);
  CHECK_FALSE(r.consistent);
}

TEST_CASE("falsifier options are validated") {
  FalsifyOptions opt;
  opt.p_max = 0;
  CHECK_THROWS_AS(a2_falsify(Activation::leaky_relu(0.5), opt), Error);
}
