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
#include <string>

#include "sublevel/error.hpp"
#include "sublevel/network.hpp"
#include "support.hpp"

using namespace sublevel;
using namespace sublevel::testing;

namespace {

NetworkSpec leaky_spec(std::vector<Index> widths, const char* loss = "square") {
  return NetworkSpec(std::move(widths), Activation::leaky_relu(0.5), make_loss(loss));
}

Theta scalar_theta(double w1, double b1, double w2) {
  Theta t;
  t.layers = {{Matrix::Constant(1, 1, w1), Vector::Constant(1, b1)},
              {Matrix::Constant(1, 1, w2), Vector()}};
  return t;
}

}  // namespace

TEST_CASE("forward hand examples") {
  NetworkSpec spec = leaky_spec({1, 1, 1});
  CHECK(network_output(spec, scalar_theta(1, 0, 1), Matrix::Constant(1, 1, 1.0))(0, 0) == 1.0);
  CHECK(network_output(spec, scalar_theta(1, 0, 1), Matrix::Constant(1, 1, -2.0))(0, 0) == -1.0);

  std::vector<Matrix> f = forward(spec, scalar_theta(1, 0, 1), Matrix::Constant(1, 1, 1.0));
  REQUIRE(f.size() == 3);
  CHECK(f[0](0, 0) == 1.0);
}

TEST_CASE("forward agrees with a loop evaluator") {
  Rng rng(21);
  NetworkSpec spec = leaky_spec({2, 4, 3, 1});
  for (int trial = 0; trial < 50; ++trial) {
    Theta theta = random_theta(spec, rng);
    Matrix X = gaussian(3, 2, rng);
    Matrix expect = loop_forward(theta, X, [](double x) { return leaky(x, 0.5); });
    Matrix got = network_output(spec, theta, X);
    CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + expect.norm()));
    std::vector<Matrix> f = forward(spec, theta, X);
    CHECK(f.size() == 4);
    for (std::size_t l = 0; l < f.size(); ++l) {
      CHECK(f[l].rows() == 3);
      CHECK(f[l].cols() == spec.width(l));
    }
  }
}

TEST_CASE("forward is bit-deterministic") {
  Rng rng(22);
  NetworkSpec spec = leaky_spec({3, 6, 4, 2});
  Theta theta = random_theta(spec, rng);
  Matrix X = gaussian(5, 3, rng);
  std::vector<Matrix> a = forward(spec, theta, X);
  std::vector<Matrix> b = forward(spec, theta, X);
  for (std::size_t l = 0; l < a.size(); ++l) CHECK((a[l].array() == b[l].array()).all());
}

TEST_CASE("dimension mismatch names the layer") {
  Rng rng(23);
  NetworkSpec spec = leaky_spec({2, 4, 3, 1});
  Theta theta = random_theta(spec, rng);
  theta.layers[1].W = Matrix::Zero(5, 3);
  try {
    network_output(spec, theta, gaussian(3, 2, rng));
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
    CHECK(std::string(e.what()).find("layer 2") != std::string::npos);
  }
  Theta good = random_theta(spec, rng);
  CHECK_THROWS_AS(network_output(spec, good, gaussian(3, 3, rng)), Error);
  Theta with_bias = good;
  with_bias.layers.back().b = Vector::Zero(1);
  CHECK_THROWS_AS(validate_theta(spec, with_bias), Error);
  Theta non_finite = good;
  non_finite.layers[0].W(0, 0) = std::nan("");
  CHECK_THROWS_AS(validate_theta(spec, non_finite), Error);
}

TEST_CASE("square loss examples and oracle") {
  NetworkSpec spec = leaky_spec({1, 1, 1});
  Matrix X = Matrix::Constant(1, 1, 1.0);
  // F_L = 2, Y = 0 -> 4.
  CHECK(loss(spec, scalar_theta(1, 0, 2), DataSet::create(X, Matrix::Zero(1, 1))) == 4.0);
  CHECK(loss(spec, scalar_theta(1, 0, 2), DataSet::create(X, Matrix::Constant(1, 1, 2.0))) == 0.0);

  Rng rng(24);
  NetworkSpec wide = leaky_spec({3, 5, 2});
  for (int trial = 0; trial < 30; ++trial) {
    Theta theta = random_theta(wide, rng);
    DataSet data = generate_dataset(wide, 6, rng);
    Matrix out = loop_forward(theta, data.X(), [](double x) { return leaky(x, 0.5); });
    CHECK(loss(wide, theta, data) == doctest::Approx(loop_square_loss(out, data.Y())).epsilon(1e-12));
  }
}

TEST_CASE("cross-entropy oracle and target validation") {
  Rng rng(25);
  NetworkSpec spec = leaky_spec({2, 5, 3}, "cross_entropy");
  for (int trial = 0; trial < 30; ++trial) {
    Theta theta = random_theta(spec, rng);
    DataSet data = generate_dataset(spec, 7, rng);
    for (Index i = 0; i < data.samples(); ++i) CHECK(data.Y().row(i).sum() == 1.0);
    Matrix out = loop_forward(theta, data.X(), [](double x) { return leaky(x, 0.5); });
    CHECK(loss(spec, theta, data) == doctest::Approx(loop_cross_entropy(out, data.Y())).epsilon(1e-12));
  }
  Theta theta = random_theta(spec, rng);
  Matrix X = gaussian(2, 2, rng);
  Matrix soft(2, 3);
  soft << 0.5, 0.5, 0.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(loss(spec, theta, DataSet::create(X, soft)), Error);
  Matrix two_hot(2, 3);
  two_hot << 1, 1, 0, 0, 0, 1;
  CHECK_THROWS_AS(loss(spec, theta, DataSet::create(X, two_hot)), Error);
}

TEST_CASE("losses are convex in the prediction") {
  Rng rng(26);
  for (const char* name : {"square", "cross_entropy"}) {
    auto psi = make_loss(name);
    for (int trial = 0; trial < 200; ++trial) {
      Index N = uniform_int(rng, 1, 6);
      Index p = uniform_int(rng, 2, 4);
      Matrix Y = Matrix::Zero(N, p);
      if (std::string(name) == "square") {
        Y = gaussian(N, p, rng);
      } else {
        for (Index i = 0; i < N; ++i) Y(i, uniform_int(rng, 0, p - 1)) = 1.0;
      }
      Matrix A = gaussian(N, p, rng, 3.0);
      Matrix B = gaussian(N, p, rng, 3.0);
      double t = uniform(rng, 0.0, 1.0);
      double lhs = psi->value(t * A + (1 - t) * B, Y);
      CHECK(lhs <= t * psi->value(A, Y) + (1 - t) * psi->value(B, Y) + 1e-10);
    }
  }
}

TEST_CASE("distinct rows") {
  Matrix a(2, 1);
  a << 0, 1;
  CHECK(check_distinct_rows(a, 1e-9));
  Matrix b(2, 2);
  b << 1, 2, 1, 2;
  CHECK_FALSE(check_distinct_rows(b, 0.0));
  CHECK_THROWS_AS(DataSet::create(b, Matrix::Zero(2, 1)), Error);

  Rng rng(27);
  Matrix g = gaussian(16, 3, rng);
  double closest = INFINITY;
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = 0; j < i; ++j) {
      closest = std::min(closest, (g.row(i) - g.row(j)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(check_distinct_rows(g, 1e-9) == (closest > 1e-9));

  Matrix bad = Matrix::Zero(2, 1);
  bad(1, 0) = INFINITY;
  CHECK_THROWS_AS(DataSet::create(bad, Matrix::Zero(2, 1)), Error);
  CHECK_THROWS_AS(DataSet::create(Matrix(0, 1), Matrix(0, 1)), Error);
}

TEST_CASE("spec and theta plumbing") {
  CHECK_THROWS_AS(leaky_spec({3}), Error);
  CHECK_THROWS_AS(leaky_spec({3, 0, 1}), Error);
  CHECK_THROWS_AS(make_loss("hinge"), Error);
  NetworkSpec spec = leaky_spec({2, 6, 4, 3, 1});
  CHECK(spec.depth() == 4);
  CHECK(spec.has_pyramidal_tail());
  CHECK_FALSE(leaky_spec({2, 6, 3, 4}).has_pyramidal_tail());
  CHECK(leaky_spec({2, 6, 1}).has_pyramidal_tail());
  NetworkSpec tail = spec.tail(1);
  CHECK(tail.widths() == std::vector<Index>{6, 4, 3, 1});

  Rng rng(28);
  Theta theta = random_theta(spec, rng);
  CHECK(theta.layers.back().b.size() == 0);
  CHECK(theta.size() == 2 * 6 + 6 + 6 * 4 + 4 + 4 * 3 + 3 + 3);
  CHECK(exactly_equal(theta.unflatten(theta.flatten()), theta));
  Theta other = random_theta(spec, rng);
  CHECK(exactly_equal(lerp(theta, other, 0.0), theta));
  CHECK(exactly_equal(lerp(theta, other, 1.0), other));
  Theta mid = lerp(theta, other, 0.5);
  CHECK(mid.layers[0].W(0, 0) == 0.5 * theta.layers[0].W(0, 0) + 0.5 * other.layers[0].W(0, 0));
  CHECK(max_abs_diff(theta, theta) == 0.0);
}
