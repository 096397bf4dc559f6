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
#include "sublevel/training.hpp"
#include "support.hpp"

using namespace sublevel;
using namespace sublevel::testing;

TEST_CASE("gradient matches central differences") {
  Rng rng(31);
  for (const char* name : {"square", "cross_entropy"}) {
    NetworkSpec spec({2, 5, 3, 2}, Activation::leaky_relu(0.3), make_loss(name));
    for (int trial = 0; trial < 10; ++trial) {
      Theta theta = random_theta(spec, rng);
      DataSet data = generate_dataset(spec, 6, rng);
      LossGradient g = loss_gradient(spec, theta, data);
      CHECK(g.value == loss(spec, theta, data));
      Vector flat = theta.flatten();
      Vector grad = g.gradient.flatten();
      const double h = 1e-6;
      for (Index i = 0; i < flat.size(); ++i) {
        Vector up = flat, down = flat;
        up(i) += h;
        down(i) -= h;
        double fd = (loss(spec, theta.unflatten(up), data) -
                     loss(spec, theta.unflatten(down), data)) / (2 * h);
        // A kink inside [-h, h] would spoil the comparison; random data
        // makes that a measure-zero event.
        CHECK(std::abs(fd - grad(i)) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("zero steps returns the initialization") {
  Rng rng(32);
  NetworkSpec spec({2, 4, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  Theta init = random_theta(spec, rng);
  DataSet data = generate_dataset(spec, 3, rng);
  TrainOptions opt;
  opt.steps = 0;
  TrainResult r = train_gradient_descent(spec, init, data, opt);
  CHECK(exactly_equal(r.theta, init));
  CHECK(r.final_loss == loss(spec, init, data));
}

TEST_CASE("training reduces the loss") {
  Rng rng(33);
  NetworkSpec spec({2, 4, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  Theta init = random_theta(spec, rng);
  DataSet data = generate_dataset(spec, 3, rng);
  TrainOptions opt;
  opt.steps = 5000;
  opt.learning_rate = 0.05;
  TrainResult r = train_gradient_descent(spec, init, data, opt);
  CHECK(std::isfinite(r.final_loss));
  CHECK(r.final_loss < loss(spec, init, data));
  CHECK(r.final_loss < 1e-3);
  REQUIRE(r.history.size() >= 2);
  CHECK(r.history.back() <= r.history.front());
}

TEST_CASE("huge learning rate is reported as divergence") {
  Rng rng(34);
  NetworkSpec spec({2, 4, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = generate_dataset(spec, 3, rng);
  TrainOptions opt;
  opt.learning_rate = 1e6;
  try {
    train_gradient_descent(spec, random_theta(spec, rng), data, opt);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDiverged);
    CHECK(std::string(e.what()).find("learning rate") != std::string::npos);
  }
}
