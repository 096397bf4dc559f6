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
#include "sublevel/training.hpp"
#include "sublevel/verify.hpp"
#include "support.hpp"

using namespace sublevel;
using namespace sublevel::testing;

namespace {

Theta trained(const NetworkSpec& spec, const DataSet& data, Rng& rng, int steps) {
  TrainOptions opt;
  opt.steps = steps;
  opt.learning_rate = 0.05;
  return train_gradient_descent(spec, random_theta(spec, rng), data, opt).theta;
}

}  // namespace

TEST_CASE("depth one: straight line stays below the endpoint maximum") {
  Rng rng(81);
  NetworkSpec spec({4, 2}, Activation::leaky_relu(0.5), make_loss("square"));
  for (int trial = 0; trial < 50; ++trial) {
    DataSet data = DataSet::create(gaussian(4, 4, rng), gaussian(4, 2, rng));
    Theta a = random_theta(spec, rng), b = random_theta(spec, rng);
    double alpha = std::max(loss(spec, a, data), loss(spec, b, data));
    SubnetResult r = subnet_connect(spec, data, a, b, alpha);
    CHECK(r.regime == SubnetRegime::kLastLayerLine);
    CHECK(r.path.size() == 1);
    CHECK(loss(spec, r.path.segments()[0].at(0.5), data) <= alpha + 1e-12);
  }
}

TEST_CASE("identical endpoints give a constant path") {
  Rng rng(82);
  NetworkSpec spec({5, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = DataSet::create(gaussian(4, 5, rng), gaussian(4, 1, rng));
  Theta a = random_theta(spec, rng);
  SubnetResult r = subnet_connect(spec, data, a, a, loss(spec, a, data));
  CHECK(r.path.size() == 1);
  CHECK(exactly_equal(r.path.end(), a));
}

TEST_CASE("deeper tail on full-row-rank data, trained endpoints") {
  // The layers above the first of a (2, 6, 3, 1) network with N = 5.
  Rng rng(83);
  NetworkSpec spec({6, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = DataSet::create(gaussian(5, 6, rng), gaussian(5, 1, rng));
  Theta a = trained(spec, data, rng, 4000);
  Theta b = trained(spec, data, rng, 4000);
  double alpha = 0.1;
  REQUIRE(loss(spec, a, data) <= alpha);
  REQUIRE(loss(spec, b, data) <= alpha);
  SubnetResult r = subnet_connect(spec, data, a, b, alpha);
  CHECK(r.regime == SubnetRegime::kFeatureCanonical);
  VerifyOptions v;
  v.samples_per_segment = 2000;
  PathReport rep = verify_path(spec, data, r.path, a, b, alpha, v);
  CHECK(rep.passed);
  CHECK(rep.max_loss <= alpha + 1e-6);
}

TEST_CASE("three hidden layers above the input") {
  Rng rng(84);
  NetworkSpec spec({7, 5, 3, 2}, Activation::leaky_relu(0.3), make_loss("cross_entropy"));
  for (int trial = 0; trial < 5; ++trial) {
    Matrix Y = Matrix::Zero(6, 2);
    for (Index i = 0; i < 6; ++i) Y(i, i % 2) = 1.0;
    DataSet data = DataSet::create(gaussian(6, 7, rng), Y);
    Theta a = trained(spec, data, rng, 500);
    Theta b = random_theta(spec, rng);
    double alpha = std::max(loss(spec, a, data), loss(spec, b, data));
    SubnetResult r = subnet_connect(spec, data, a, b, alpha);
    CHECK(r.regime == SubnetRegime::kFeatureCanonical);
    CHECK(verify_path(spec, data, r.path, a, b, alpha).passed);
  }
}

TEST_CASE("regime selection and failures") {
  Rng rng(85);
  NetworkSpec widening({4, 2, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = DataSet::create(gaussian(3, 4, rng), gaussian(3, 1, rng));
  Theta a = random_theta(widening, rng), b = random_theta(widening, rng);
  double alpha = std::max(loss(widening, a, data), loss(widening, b, data));
  SubnetOptions forced;
  forced.regime = SubnetRegime::kFeatureCanonical;
  try {
    subnet_connect(widening, data, a, b, alpha, forced);
    FAIL("expected kHomotopyFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kHomotopyFailed);
  }

  // A generous bound lets the knot optimizer accept at once.
  SubnetOptions homotopy;
  homotopy.regime = SubnetRegime::kHomotopy;
  SubnetResult r = subnet_connect(widening, data, a, b, alpha + 100.0, homotopy);
  CHECK(r.regime == SubnetRegime::kHomotopy);
  CHECK(verify_path(widening, data, r.path, a, b, alpha + 100.0).passed);

  CHECK_THROWS_AS(subnet_connect(widening, data, a, b, alpha - 1.0), Error);
  DataSet rank_deficient = DataSet::create(gaussian(3, 2, rng) * gaussian(2, 4, rng),
                                           gaussian(3, 1, rng));
  CHECK_THROWS_AS(subnet_connect(widening, rank_deficient, a, b, 1e9), Error);
}

TEST_CASE("knot optimization lowers the maximum along a path") {
  Rng rng(86);
  NetworkSpec spec({1, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = DataSet::create((Matrix(3, 1) << -1.0, 0.2, 1.5).finished(),
                                 (Matrix(3, 1) << 0.5, -0.3, 1.0).finished());
  Theta a = trained(spec, data, rng, 3000);
  Theta b = trained(spec, data, rng, 3000);
  double base = std::max(loss(spec, a, data), loss(spec, b, data));
  HomotopyResult h = optimize_knot_path(spec, data, a, b, base);
  CHECK(h.knots.size() >= 2);
  CHECK(exactly_equal(h.knots.front(), a));
  CHECK(exactly_equal(h.knots.back(), b));
  ParamPath p = knots_to_path(h.knots);
  CHECK(exactly_equal(p.start(), a));
  CHECK(exactly_equal(p.end(), b));
  double straight = 0.0;
  for (int i = 0; i <= 100; ++i) straight = std::max(straight, loss(spec, lerp(a, b, i / 100.0), data));
  CHECK(h.max_loss <= straight + 1e-12);
}
