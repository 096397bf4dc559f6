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

#include <sstream>
#include <string>

#include "sublevel/construct.hpp"
#include "sublevel/verify.hpp"
#include "support.hpp"

using namespace sublevel;
using namespace sublevel::testing;

TEST_CASE("constant path at zero loss passes") {
  Rng rng(101);
  NetworkSpec spec({2, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  Theta theta = random_theta(spec, rng);
  Matrix X = gaussian(2, 2, rng);
  DataSet data = DataSet::create(X, network_output(spec, theta, X));
  PathReport r = verify_path(spec, data, ParamPath(Segment::constant(theta)), 0.0);
  CHECK(r.passed);
  CHECK(r.max_loss == 0.0);
  CHECK(r.n_samples == 200);
}

TEST_CASE("broken chaining fails verification") {
  Rng rng(102);
  NetworkSpec spec({2, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = generate_dataset(spec, 2, rng);
  Theta a = random_theta(spec, rng), b = random_theta(spec, rng), c = random_theta(spec, rng);
  ParamPath broken = ParamPath::unchecked(
      {Segment::linear(a, b, false), Segment::linear(c, b, false)});
  PathReport r = verify_path(spec, data, broken, a, b, 1e9);
  CHECK_FALSE(r.passed);
  CHECK(r.max_junction_gap > 1e-9);

  ParamPath fine(Segment::linear(a, b, false));
  PathReport wrong_end = verify_path(spec, data, fine, a, c, 1e9);
  CHECK_FALSE(wrong_end.passed);
  CHECK(wrong_end.endpoint_residuals.second > 1e-9);
  CHECK(verify_path(spec, data, fine, a, b, 1e9).passed);

  CHECK_THROWS(ParamPath(Segment::linear(a, b, false)).append(Segment::linear(c, a, false)));
}

TEST_CASE("sublevel bound and invariance are enforced") {
  Rng rng(103);
  NetworkSpec spec({2, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = generate_dataset(spec, 2, rng);
  Theta a = random_theta(spec, rng), b = random_theta(spec, rng);
  double la = loss(spec, a, data), lb = loss(spec, b, data);
  ParamPath line(Segment::linear(a, b, false));
  CHECK_FALSE(verify_path(spec, data, line, std::min(la, lb)).passed);
  // Falsely declared output-preserving.
  ParamPath liar(Segment::linear(a, b, true));
  PathReport r = verify_path(spec, data, liar, 1e9);
  CHECK_FALSE(r.passed);
  CHECK(r.per_segment_invariance[0] > 1e-8);
}

TEST_CASE("curve segment drift on a random instance") {
  Rng rng(104);
  NetworkSpec spec({3, 6, 2}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = generate_dataset(spec, 4, rng);
  Theta theta = random_theta(spec, rng);
  Matrix F = hidden_features(spec, theta, data.X(), 1);
  IndexList basis = independent_columns(F);
  IndexList dependent;
  for (Index c = 0; c < 6; ++c) {
    if (std::find(basis.begin(), basis.end(), c) == basis.end()) dependent.push_back(c);
  }
  ParamPath p(Segment::block_curve(
      theta, 1, zero_dependent_rows(F, theta.layers[1].W, basis, dependent)));
  PathReport r = verify_path(spec, data, p, loss(spec, theta, data));
  CHECK(r.passed);
  CHECK(r.output_preserving[0]);
  CHECK(r.per_segment_invariance[0] <= 1e-10);
}

TEST_CASE("trace CSV") {
  Rng rng(105);
  NetworkSpec spec({2, 3, 1}, Activation::leaky_relu(0.5), make_loss("square"));
  DataSet data = generate_dataset(spec, 2, rng);
  Theta a = random_theta(spec, rng), b = random_theta(spec, rng), c = random_theta(spec, rng);
  ParamPath p(Segment::linear(a, b, false));
  p.append(Segment::linear(b, c, false));
  std::ostringstream os;
  write_trace_csv(os, spec, data, p, 5);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "segment_index,lambda,loss,param_l2_norm,output_drift");
  int rows = 0;
  long last_segment = -1;
  while (std::getline(is, line)) {
    long seg = std::stol(line.substr(0, line.find(',')));
    CHECK(seg >= last_segment);
    last_segment = seg;
    ++rows;
  }
  CHECK(rows == 10);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
