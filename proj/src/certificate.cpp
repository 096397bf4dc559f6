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

#include "sublevel/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "sublevel/error.hpp"

namespace sublevel {
namespace {

WidthNInstance build_from(const Matrix& X, Rng& rng, std::uint64_t seed,
                          double slope, int max_retries) {
  const Index N = X.rows();
  require(N >= 2, ErrorCode::kInvalidArgument, "width-N instance needs N >= 2");
  require(X.cols() >= 1, ErrorCode::kInvalidArgument, "need n_0 >= 1");
  require(check_distinct_rows(X, 0.0), ErrorCode::kPrecondition,
          "X must have pairwise distinct rows");
  NetworkSpec spec({X.cols(), N, N}, Activation::leaky_relu(slope),
                   make_loss(LossKind::kSquare));
  std::normal_distribution<double> normal(0.0, 1.0);

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Theta theta;
    Layer first;
    first.W = Matrix::NullaryExpr(X.cols(), N, [&]() { return normal(rng); });
    first.b.resize(N);
    for (Index j = 0; j < N; ++j) {
      Vector z = X * first.W.col(j);
      double mean = z.mean();
      double spread = std::sqrt((z.array() - mean).square().mean());
      if (!(spread > 0.0)) spread = 1.0;
      first.b(j) = -(mean + spread * normal(rng));
    }
    Layer second;
    second.W = Matrix::NullaryExpr(N, N, [&]() { return normal(rng); });
    theta.layers = {first, second};

    Matrix F = hidden_features(spec, theta, X, 1);
    if (numeric_rank(F).rank != N || det_sign(F) == 0) continue;
    if (numeric_rank(second.W).rank != N || det_sign(second.W) == 0) continue;
    Matrix Y = network_output(spec, theta, X);
    if (numeric_rank(Y).rank != N) continue;
    return {spec, DataSet::create(X, std::move(Y)), std::move(theta), seed};
  }
  fail(ErrorCode::kRankNotRestored,
       "could not draw a full-rank width-N instance in " +
           std::to_string(max_retries) + " attempts");
}

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void fnv_matrix(std::uint64_t& h, const Matrix& m) {
  std::int64_t dims[2] = {m.rows(), m.cols()};
  fnv_bytes(h, dims, sizeof dims);
  fnv_bytes(h, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

}  // namespace

WidthNInstance build_width_n_instance(Index N, Index n0, std::uint64_t seed,
                                      double slope, int max_retries) {
  require(N >= 2, ErrorCode::kInvalidArgument, "width-N instance needs N >= 2");
  require(n0 >= 1, ErrorCode::kInvalidArgument, "need n_0 >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix X;
  do {
    X = Matrix::NullaryExpr(N, n0, [&]() { return normal(rng); });
  } while (!check_distinct_rows(X, 1e-9));
  return build_from(X, rng, seed, slope, max_retries);
}

WidthNInstance build_width_n_instance(const Matrix& X, std::uint64_t seed,
                                      double slope, int max_retries) {
  Rng rng(seed);
  return build_from(X, rng, seed, slope, max_retries);
}

Theta permute_neurons(const Theta& theta, Index j, Index k) {
  require(theta.depth() >= 2, ErrorCode::kInvalidArgument,
          "permute_neurons needs a hidden layer");
  const Index width = theta.layers[0].W.cols();
  require(j >= 0 && k < width && j < k, ErrorCode::kInvalidArgument,
          "permute_neurons needs 0 <= j < k < n_1");
  Theta out = theta;
  out.layers[0].W.col(j).swap(out.layers[0].W.col(k));
  std::swap(out.layers[0].b(j), out.layers[0].b(k));
  out.layers[1].W.row(j).swap(out.layers[1].W.row(k));
  return out;
}

bool DisconnectionCertificate::valid() const { return failure_reason().empty(); }

std::string DisconnectionCertificate::failure_reason() const {
  if (static_cast<Index>(index_set.size()) != hidden_width) {
    return "index set size differs from the hidden width";
  }
  if (det_sign_theta == 0 || det_sign_theta_prime == 0) {
    return "degenerate determinant";
  }
  if (det_sign_theta * det_sign_theta_prime != -1) {
    return "determinant signs agree";
  }
  if (y_rank != hidden_width) return "target rows are not independent";
  if (!(loss_theta <= minimum_tol && loss_theta_prime <= minimum_tol)) {
    return "an endpoint is not a global minimum";
  }
  return {};
}

DisconnectionCertificate certify_disconnection(const NetworkSpec& spec,
                                               const DataSet& data,
                                               const Theta& theta,
                                               const Theta& theta_prime,
                                               const IndexList& index_set) {
  require(spec.depth() == 2, ErrorCode::kInvalidArgument,
          "certificates are defined for two-layer networks");
  const Index width = spec.width(1);
  require(static_cast<Index>(index_set.size()) == width,
          ErrorCode::kInvalidArgument, "index set must have n_1 samples");
  IndexList sorted = index_set;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          ErrorCode::kInvalidArgument, "index set has repeated samples");
  require(sorted.empty() || (sorted.front() >= 0 && sorted.back() < data.samples()),
          ErrorCode::kInvalidArgument, "index set entry out of range");

  DisconnectionCertificate cert;
  cert.index_set = index_set;
  cert.hidden_width = width;
  cert.det_sign_theta =
      det_sign(select_rows(hidden_features(spec, theta, data.X(), 1), index_set));
  cert.det_sign_theta_prime = det_sign(
      select_rows(hidden_features(spec, theta_prime, data.X(), 1), index_set));
  cert.y_rank = numeric_rank(select_rows(data.Y(), index_set)).rank;
  cert.loss_theta = loss(spec, theta, data);
  cert.loss_theta_prime = loss(spec, theta_prime, data);
  return cert;
}

BarrierScan barrier_scan(const NetworkSpec& spec, const DataSet& data,
                         const Theta& theta, const Theta& theta_prime,
                         int n_samples, const HomotopyOptions& optimizer) {
  require(n_samples >= 2, ErrorCode::kInvalidArgument,
          "barrier scan needs at least 2 samples");
  const double base = std::max(loss(spec, theta, data), loss(spec, theta_prime, data));
  auto path_max = [&](const std::vector<Theta>& knots) {
    double m = -INFINITY;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      for (int s = 0; s < n_samples; ++s) {
        double t = static_cast<double>(s) / static_cast<double>(n_samples - 1);
        m = std::max(m, loss(spec, lerp(knots[i], knots[i + 1], t), data));
      }
    }
    return m;
  };

  BarrierScan scan;
  scan.straight = path_max({theta, theta_prime}) - base;

  Theta mid = lerp(theta, theta_prime, 0.5);
  if (spec.loss().name() == "square") {
    Matrix H = forward(spec, mid, data.X())[spec.depth() - 1];
    mid.layers.back().W = H.completeOrthogonalDecomposition().solve(data.Y());
  }
  scan.resolved_midpoint = path_max({theta, mid, theta_prime}) - base;

  HomotopyResult h = optimize_knot_path(spec, data, theta, theta_prime, base, optimizer);
  scan.optimized = path_max(h.knots) - base;

  scan.barrier = std::min({scan.straight, scan.resolved_midpoint, scan.optimized});
  return scan;
}

PaddedNetwork pad_first_layer(const NetworkSpec& spec, const Theta& theta,
                              Rng& rng) {
  require(spec.depth() >= 2, ErrorCode::kInvalidArgument,
          "padding needs a hidden layer");
  validate_theta(spec, theta);
  std::vector<Index> widths = spec.widths();
  widths[1] += 1;
  NetworkSpec padded(widths, spec.activation(), spec.loss_ptr());
  std::normal_distribution<double> normal(0.0, 1.0);
  Theta out = theta;
  Layer& first = out.layers[0];
  first.W.conservativeResize(Eigen::NoChange, widths[1]);
  first.W.col(widths[1] - 1) =
      Vector::NullaryExpr(widths[0], [&]() { return normal(rng); });
  first.b.conservativeResize(widths[1]);
  first.b(widths[1] - 1) = normal(rng);
  Layer& second = out.layers[1];
  second.W.conservativeResize(widths[1], Eigen::NoChange);
  second.W.row(widths[1] - 1).setZero();
  return {padded, out};
}

Theta pad_like(const Theta& theta, const Theta& padded_reference) {
  Theta out = theta;
  const Index width = padded_reference.layers[0].W.cols();
  require(theta.layers[0].W.cols() + 1 == width, ErrorCode::kDimensionMismatch,
          "reference is not a one-neuron padding of theta");
  out.layers[0].W.conservativeResize(Eigen::NoChange, width);
  out.layers[0].W.col(width - 1) = padded_reference.layers[0].W.col(width - 1);
  out.layers[0].b.conservativeResize(width);
  out.layers[0].b(width - 1) = padded_reference.layers[0].b(width - 1);
  out.layers[1].W.conservativeResize(width, Eigen::NoChange);
  out.layers[1].W.row(width - 1).setZero();
  return out;
}

std::uint64_t instance_hash(const DataSet& data, const Theta& theta) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv_matrix(h, data.X());
  fnv_matrix(h, data.Y());
  for (const Layer& l : theta.layers) {
    fnv_matrix(h, l.W);
    fnv_matrix(h, l.b);
  }
  return h;
}

}  // namespace sublevel
