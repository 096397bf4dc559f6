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

#pragma once

#include <cstdint>
#include <string>

#include "sublevel/construct.hpp"
#include "sublevel/linalg.hpp"
#include "sublevel/network.hpp"

namespace sublevel {

/// Two-layer network of hidden width N fitting N samples exactly.
struct WidthNInstance {
  NetworkSpec spec;
  DataSet data;
  Theta theta;
  std::uint64_t seed = 0;
};

/// Gaussian X (n_0 columns) with distinct rows, first layer redrawn until
/// rank(F_1) = N, invertible W_2 and Y := F_1 W_2. Square loss, leaky ReLU.
WidthNInstance build_width_n_instance(Index N, Index n0, std::uint64_t seed,
                                      double slope = 0.5,
                                      int max_retries = 100);
/// Same with caller-supplied inputs; throws kPrecondition on duplicate rows.
WidthNInstance build_width_n_instance(const Matrix& X, std::uint64_t seed,
                                      double slope = 0.5,
                                      int max_retries = 100);

/// Exchanges first-layer neurons j and k (0-based, j < k).
Theta permute_neurons(const Theta& theta, Index j, Index k);

struct DisconnectionCertificate {
  IndexList index_set;
  int det_sign_theta = 0;
  int det_sign_theta_prime = 0;
  double loss_theta = 0.0;
  double loss_theta_prime = 0.0;
  Index y_rank = 0;
  Index hidden_width = 0;
  double minimum_tol = 1e-10;

  /// Opposite nonzero determinant signs, y_rank = n_1, both losses at the
  /// global minimum.
  bool valid() const;
  /// Human-readable reason when !valid(); empty otherwise.
  std::string failure_reason() const;
};

DisconnectionCertificate certify_disconnection(const NetworkSpec& spec,
                                               const DataSet& data,
                                               const Theta& theta,
                                               const Theta& theta_prime,
                                               const IndexList& index_set);

struct BarrierScan {
  double straight = 0.0;
  double resolved_midpoint = 0.0;
  double optimized = 0.0;
  /// Minimum over the strategies of (max path loss - endpoint loss).
  double barrier = 0.0;
};

/// Empirical barrier between two equal-loss points. Positive values are
/// consistent with disconnection; they prove nothing.
BarrierScan barrier_scan(const NetworkSpec& spec, const DataSet& data,
                         const Theta& theta, const Theta& theta_prime,
                         int n_samples, const HomotopyOptions& optimizer = {});

/// Adds one first-layer neuron with random incoming and zero outgoing
/// weights; the network output is unchanged.
struct PaddedNetwork {
  NetworkSpec spec;
  Theta theta;
};
PaddedNetwork pad_first_layer(const NetworkSpec& spec, const Theta& theta,
                              Rng& rng);
/// Same neuron appended to a second point, reusing the incoming weights the
/// first call drew.
Theta pad_like(const Theta& theta, const Theta& padded_reference);

/// FNV-1a over the raw bytes of X, Y and theta.
std::uint64_t instance_hash(const DataSet& data, const Theta& theta);

}  // namespace sublevel
