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

// Shared generators and independent oracles for the unit tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "sublevel/activation.hpp"
#include "sublevel/network.hpp"
#include "sublevel/path.hpp"

namespace sublevel::testing {

inline Matrix gaussian(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return Matrix::NullaryExpr(rows, cols, [&]() { return n(rng); });
}

inline Index uniform_int(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random valid piecewise-linear activation with 1..4 breakpoints.
inline Activation random_piecewise(Rng& rng) {
  Index k = uniform_int(rng, 1, 4);
  std::vector<double> bps;
  for (Index i = 0; i < k; ++i) bps.push_back(uniform(rng, -3.0, 3.0));
  std::sort(bps.begin(), bps.end());
  for (std::size_t i = 1; i < bps.size(); ++i) {
    if (bps[i] <= bps[i - 1]) bps[i] = bps[i - 1] + 0.1;
  }
  std::vector<double> slopes;
  for (Index i = 0; i <= k; ++i) slopes.push_back(uniform(rng, 0.1, 3.0));
  slopes[0] = 0.3;
  slopes[1] = 1.7;
  return Activation::piecewise_linear(bps, slopes);
}

/// Scalar leaky ReLU written out by hand.
inline double leaky(double x, double slope) { return x >= 0.0 ? x : slope * x; }

/// Straightforward triple-loop evaluator of the network output.
inline Matrix loop_forward(const Theta& theta, const Matrix& X,
                           const std::function<double(double)>& act) {
  Matrix cur = X;
  for (std::size_t l = 0; l < theta.layers.size(); ++l) {
    const Matrix& W = theta.layers[l].W;
    Matrix next(cur.rows(), W.cols());
    for (Index i = 0; i < cur.rows(); ++i) {
      for (Index j = 0; j < W.cols(); ++j) {
        double s = 0.0;
        for (Index k = 0; k < W.rows(); ++k) s += cur(i, k) * W(k, j);
        if (l + 1 < theta.layers.size()) s = act(s + theta.layers[l].b(j));
        next(i, j) = s;
      }
    }
    cur = next;
  }
  return cur;
}

inline double loop_square_loss(const Matrix& P, const Matrix& Y) {
  double s = 0.0;
  for (Index i = 0; i < P.rows(); ++i) {
    for (Index j = 0; j < P.cols(); ++j) s += (P(i, j) - Y(i, j)) * (P(i, j) - Y(i, j));
  }
  return s / static_cast<double>(P.rows());
}

inline double loop_cross_entropy(const Matrix& P, const Matrix& Y) {
  double s = 0.0;
  for (Index i = 0; i < P.rows(); ++i) {
    double denom = 0.0;
    for (Index j = 0; j < P.cols(); ++j) denom += std::exp(P(i, j));
    for (Index j = 0; j < P.cols(); ++j) {
      if (Y(i, j) == 1.0) s -= std::log(std::exp(P(i, j)) / denom);
    }
  }
  return s / static_cast<double>(P.rows());
}

/// Max relative output drift ||F_L(path(t)) - F_L(start)||_F / max(1, ||F_L||)
/// over uniform samples of every segment.
inline double path_drift(const NetworkSpec& spec, const Matrix& X,
                         const ParamPath& path, int samples = 50) {
  Matrix ref = network_output(spec, path.start(), X);
  double worst = 0.0;
  for (const Segment& s : path.segments()) {
    for (int i = 0; i < samples; ++i) {
      double t = static_cast<double>(i) / (samples - 1);
      Matrix out = network_output(spec, s.at(t), X);
      worst = std::max(worst, (out - ref).norm() / std::max(1.0, ref.norm()));
    }
  }
  return worst;
}

inline IndexList iota(Index n) {
  IndexList out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace sublevel::testing
