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
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sublevel/activation.hpp"

namespace sublevel {

using Rng = std::mt19937_64;

/// Training objective Psi(prediction, targets), convex in the prediction.
/// Implement this to plug in a new loss.
class ConvexLoss {
 public:
  virtual ~ConvexLoss() = default;
  virtual std::string name() const = 0;
  virtual double value(const Matrix& prediction, const Matrix& targets) const = 0;
  /// d value / d prediction.
  virtual Matrix gradient(const Matrix& prediction,
                          const Matrix& targets) const = 0;
  /// Throws if the targets are not admissible for this loss.
  virtual void validate_targets(const Matrix& targets) const = 0;
};

enum class LossKind { kSquare, kCrossEntropy };

std::shared_ptr<const ConvexLoss> make_loss(LossKind kind);
/// "square" or "cross_entropy".
std::shared_ptr<const ConvexLoss> make_loss(const std::string& name);

/// Static architecture: widths n_0..n_L, activation, loss.
class NetworkSpec {
 public:
  NetworkSpec(std::vector<Index> widths, Activation activation,
              std::shared_ptr<const ConvexLoss> loss);

  const std::vector<Index>& widths() const { return widths_; }
  Index width(std::size_t layer) const { return widths_.at(layer); }
  /// Number of weight layers L.
  std::size_t depth() const { return widths_.size() - 1; }
  Index input_dim() const { return widths_.front(); }
  Index output_dim() const { return widths_.back(); }
  const Activation& activation() const { return activation_; }
  const ConvexLoss& loss() const { return *loss_; }
  std::shared_ptr<const ConvexLoss> loss_ptr() const { return loss_; }

  /// Widths n_2 > n_3 > ... > n_L. Vacuous for L <= 2.
  bool has_pyramidal_tail() const;

  /// Network made of layers [first, L) fed with data of width n_first.
  NetworkSpec tail(std::size_t first) const;

 private:
  std::vector<Index> widths_;
  Activation activation_;
  std::shared_ptr<const ConvexLoss> loss_;
};

/// One weight layer. The output layer carries no bias (b has size 0).
struct Layer {
  Matrix W;
  Vector b;
};

/// A point in parameter space. layers[i] maps features of width n_i to
/// width n_{i+1}; only the last layer is bias-free.
struct Theta {
  std::vector<Layer> layers;

  std::size_t depth() const { return layers.size(); }
  /// Total number of scalar parameters.
  Index size() const;
  Vector flatten() const;
  /// Inverse of flatten, using this theta's block shapes.
  Theta unflatten(const Vector& flat) const;
};

/// Shape check plus finiteness; throws kDimensionMismatch naming the layer.
void validate_theta(const NetworkSpec& spec, const Theta& theta);

bool exactly_equal(const Theta& a, const Theta& b);
/// Largest absolute entry-wise difference; +inf on a shape mismatch.
double max_abs_diff(const Theta& a, const Theta& b);
double l2_norm(const Theta& theta);
/// (1 - t) a + t b, block-wise. Returns a (or b) verbatim at t = 0 (or 1);
/// blocks equal in a and b are copied unchanged.
Theta lerp(const Theta& a, const Theta& b, double t);

/// Gaussian initialization with per-layer scale 1/sqrt(fan_in); zero biases
/// are not used so that first-layer kinks fall inside the data.
Theta random_theta(const NetworkSpec& spec, Rng& rng);

/// Training data. Rows of X are pairwise distinct and all entries finite.
class DataSet {
 public:
  static DataSet create(Matrix X, Matrix Y);

  const Matrix& X() const { return X_; }
  const Matrix& Y() const { return Y_; }
  Index samples() const { return X_.rows(); }

 private:
  DataSet(Matrix X, Matrix Y) : X_(std::move(X)), Y_(std::move(Y)) {}
  Matrix X_;
  Matrix Y_;
};

/// True iff every pair of rows differs by more than tol in the sup norm.
bool check_distinct_rows(const Matrix& X, double tol);

/// Feature matrices F_0 = X, ..., F_L.
std::vector<Matrix> forward(const NetworkSpec& spec, const Theta& theta,
                            const Matrix& X);
/// F_L only.
Matrix network_output(const NetworkSpec& spec, const Theta& theta,
                      const Matrix& X);
/// Features of a single hidden layer (1 <= layer < L).
Matrix hidden_features(const NetworkSpec& spec, const Theta& theta,
                       const Matrix& X, std::size_t layer);

double loss(const NetworkSpec& spec, const Theta& theta, const DataSet& data);

/// Gaussian inputs with distinct rows and targets suited to the spec's loss:
/// Gaussian targets for square loss, uniformly drawn one-hot classes for
/// cross-entropy.
DataSet generate_dataset(const NetworkSpec& spec, Index samples, Rng& rng);

}  // namespace sublevel
