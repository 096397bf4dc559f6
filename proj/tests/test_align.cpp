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

#include <algorithm>

#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"
#include "support.hpp"

using namespace sublevel;
using namespace sublevel::testing;

namespace {

bool same_first_layer(const Theta& a, const Theta& b) {
  return (a.layers[0].W.array() == b.layers[0].W.array()).all() &&
         (a.layers[0].b.array() == b.layers[0].b.array()).all();
}

double loss_variation(const NetworkSpec& spec, const DataSet& data,
                      const ParamPath& path, int samples) {
  double l0 = loss(spec, path.start(), data);
  double worst = 0.0;
  for (const Segment& s : path.segments()) {
    for (int i = 0; i < samples; ++i) {
      double t = static_cast<double>(i) / (samples - 1);
      worst = std::max(worst, std::abs(loss(spec, s.at(t), data) - l0));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("aligned start gives a constant path") {
  Rng rng(71);
  NetworkSpec spec({2, 4, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  Theta theta = random_theta(spec, rng);
  Matrix X = gaussian(3, 2, rng);
  ParamPath p = align_first_layer(spec, X, theta, theta);
  for (const Segment& s : p.segments()) CHECK(exactly_equal(s.start(), s.end()));
  CHECK(path_drift(spec, X, p) == 0.0);
}

TEST_CASE("single sample, two neurons, traced by hand") {
  NetworkSpec spec({1, 2, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = DataSet::create(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.7));
  Theta theta;
  theta.layers = {{(Matrix(1, 2) << 1.0, 2.0).finished(), Vector::Zero(2)},
                  {(Matrix(2, 1) << 1.0, 0.0).finished(), Vector()}};
  Theta target;
  target.layers = {{(Matrix(1, 2) << 3.0, -1.0).finished(),
                    (Vector(2) << 0.5, 0.25).finished()},
                   {(Matrix(2, 1) << 0.2, 0.3).finished(), Vector()}};
  ParamPath p = align_first_layer(spec, data.X(), theta, target, {0, 1});
  // Neuron 0: copy into the silent neuron 1, transfer, place. Neuron 1:
  // silence it (its column depends on neuron 0), place.
  REQUIRE(p.size() == 5);
  CHECK(p.segments()[0].kind_name() == "linear");
  CHECK(p.segments()[1].kind_name() == "transfer_neuron");
  CHECK(p.segments()[2].kind_name() == "linear");
  CHECK(p.segments()[3].kind_name() == "zero_dependent_rows");
  CHECK(p.segments()[4].kind_name() == "linear");
  CHECK(same_first_layer(p.end(), target));
  CHECK(loss_variation(spec, data, p, 1000) <= 1e-10);
}

TEST_CASE("alignment across random seeds, widths (3, 5, 2, 1)") {
  NetworkSpec spec({3, 5, 2, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    DataSet data = generate_dataset(spec, 4, rng);
    Theta theta = random_theta(spec, rng);
    Theta target = random_theta(spec, rng);
    RestoreResult a = restore_full_rank(spec, data.X(), theta, rng);
    RestoreResult b = restore_full_rank(spec, data.X(), target, rng);
    IndexList order = independent_columns(hidden_features(spec, b.path.end(), data.X(), 1));
    for (Index c = 0; c < 5; ++c) {
      if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
    }
    ParamPath p = align_first_layer(spec, data.X(), a.path.end(), b.path.end(), order);
    CHECK(same_first_layer(p.end(), b.path.end()));
    CHECK(path_drift(spec, data.X(), p) <= 1e-8);
  }
}

TEST_CASE("alignment preconditions") {
  Rng rng(72);
  NetworkSpec narrow({2, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  Matrix X = gaussian(3, 2, rng);
  Theta t = random_theta(narrow, rng);
  CHECK_THROWS_AS(align_first_layer(narrow, X, t, t), Error);  // n_1 = N
  NetworkSpec spec({2, 4, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  Theta a = random_theta(spec, rng);
  CHECK_THROWS_AS(align_first_layer(spec, X, a, a, {0, 1, 2}), Error);
  CHECK_THROWS_AS(align_first_layer(spec, X, a, a, {0, 1, 2, 2}), Error);
}

TEST_CASE("nearly dependent neuron with a heavy outgoing row is not silenced") {
  NetworkSpec spec({3, 4, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  Matrix X = Matrix::Identity(3, 3);
  Theta theta;
  theta.layers.resize(2);
  // With X = I and positive pre-activations, features equal W + b. Neuron 1
  // sits 5e-9 off neuron 0 and their large outgoing weights cancel, so
  // silencing neuron 1 would move the output by about 3e-7 relative.
  // Neuron 3 = neuron 0 + neuron 2 is the clean dependent column.
  theta.layers[0].W.resize(3, 4);
  theta.layers[0].W << 1.0, 1.0, 3.0, 4.0,
                       2.0, 2.0, 0.5, 2.5,
                       1.0, 1.0 + 5e-9, 1.0, 2.0;
  theta.layers[0].b = Vector::Zero(4);
  theta.layers[1].W.resize(4, 1);
  theta.layers[1].W << -200.0, 200.0, -1.0, 0.7;
  theta.layers[1].b.resize(0);
  Theta target = theta;
  target.layers[0].W << 2.0, 0.5, 1.0, 1.0,
                        1.0, 3.0, 1.0, 2.0,
                        1.0, 1.0, 3.0, 2.0;
  target.layers[0].b << 0.1, 0.2, 0.3, 0.1;
  ParamPath p = align_first_layer(spec, X, theta, target, {0, 1, 2, 3});
  CHECK(same_first_layer(p.end(), target));
  CHECK(path_drift(spec, X, p, 100) <= 1e-8);
}
