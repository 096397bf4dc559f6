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

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "sublevel/linalg.hpp"
#include "sublevel/network.hpp"

namespace sublevel {

/// Closed-form curve c: [0, 1] -> R^{n x p} over a single matrix.
///
/// at(0) and at(1) return the stored endpoints verbatim; the end point is
/// computed once from the closed form at lambda = 1.
class MatrixCurve {
 public:
  enum class Kind { kLine, kZeroDependentRows, kTransferNeuron };

  static MatrixCurve line(Matrix start, Matrix end);
  /// Rows `basis` become W(basis,:) + lambda E W(dependent,:); rows
  /// `dependent` become (1 - lambda) W(dependent,:). Other rows are fixed.
  static MatrixCurve zero_dependent_rows(Matrix W, IndexList basis,
                                         IndexList dependent, Matrix E);
  /// Row k becomes (1 - lambda) W(k,:), row j becomes lambda W(k,:).
  static MatrixCurve transfer_neuron(Matrix W, Index j, Index k);

  Kind kind() const { return kind_; }
  Matrix at(double lambda) const;
  const Matrix& start() const { return start_; }
  const Matrix& end() const { return end_; }

  const IndexList& basis() const { return basis_; }
  const IndexList& dependent() const { return dependent_; }
  const Matrix& coefficients() const { return E_; }
  Index source() const { return k_; }
  Index destination() const { return j_; }

 private:
  MatrixCurve() = default;
  Matrix evaluate(double lambda) const;

  Kind kind_ = Kind::kLine;
  Matrix start_;
  Matrix end_;
  IndexList basis_;
  IndexList dependent_;
  Matrix E_;
  Index j_ = 0;
  Index k_ = 0;
};

/// Input data and activation needed to realize a prescribed hidden-feature
/// curve through the first weight matrix. The input must have full row rank.
struct LiftContext {
  Matrix input;
  Matrix input_pinv;
  Activation activation;
};

/// A continuous curve over [0, 1] in parameter space.
class Segment {
 public:
  enum class Kind { kLinear, kBlockCurve, kFeatureLift, kEmbedded };

  struct Linear {};
  /// W of `layer` follows `curve`; every other block is constant.
  struct BlockCurve {
    std::size_t layer;
    MatrixCurve curve;
  };
  /// Hidden features of layer `hidden` (1-based, as in forward()) follow
  /// `curve` (or its transpose); lower layers move so the realized features
  /// match it. Blocks above the lifted chain move linearly towards
  /// `co_end`.
  struct FeatureLift {
    std::size_t hidden;
    MatrixCurve curve;
    bool transposed;
    Theta co_end;
    std::shared_ptr<const LiftContext> context;
    // Cached at construction.
    std::vector<Matrix> ref_features;      // G_1..G_hidden at the start
    std::vector<Matrix> ref_preimages;     // sigma^{-1}(G_k)
    std::vector<Matrix> weight_pinv;       // pinv(W_k), k = 2..hidden
  };
  /// A segment over the layers after `prefix`, with `prefix` held fixed.
  struct Embedded {
    std::vector<Layer> prefix;
    std::shared_ptr<const Segment> inner;
  };

  static Segment linear(Theta start, Theta end, bool output_preserving);
  static Segment constant(const Theta& at);
  static Segment block_curve(const Theta& start, std::size_t layer,
                             MatrixCurve curve);
  static Segment feature_lift(const Theta& start, std::size_t hidden,
                              MatrixCurve curve, bool transposed,
                              Theta co_end,
                              std::shared_ptr<const LiftContext> context,
                              bool output_preserving);
  static Segment embedded(std::vector<Layer> prefix, Segment inner);

  Kind kind() const;
  std::string kind_name() const;
  Theta at(double lambda) const;
  const Theta& start() const { return reversed_ ? end_ : start_; }
  const Theta& end() const { return reversed_ ? start_ : end_; }
  bool output_preserving() const { return output_preserving_; }
  bool is_reversed() const { return reversed_; }
  /// Blocks whose values differ between the endpoints, e.g. "W2", "b1".
  std::vector<std::string> touched_blocks() const;
  Segment reversed() const;

  /// Orientation-independent access, used by serialization.
  const Theta& forward_start() const { return start_; }
  const Theta& forward_end() const { return end_; }
  const std::variant<Linear, BlockCurve, FeatureLift, Embedded>& payload()
      const {
    return payload_;
  }

 private:
  Segment() = default;
  Theta evaluate(double lambda) const;

  Theta start_;
  Theta end_;
  bool output_preserving_ = true;
  bool reversed_ = false;
  std::variant<Linear, BlockCurve, FeatureLift, Embedded> payload_;
};

/// Nonempty, exactly chained sequence of segments.
class ParamPath {
 public:
  explicit ParamPath(Segment first);
  /// Skips the chaining check; used for negative controls and for loading
  /// paths whose integrity is left to verify_path.
  static ParamPath unchecked(std::vector<Segment> segments);

  /// Throws kInternal unless s.start() is bit-identical to end().
  void append(Segment s);
  void append(const ParamPath& other);
  ParamPath reversed() const;

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  const Theta& start() const { return segments_.front().start(); }
  const Theta& end() const { return segments_.back().end(); }

 private:
  ParamPath() = default;
  std::vector<Segment> segments_;
};

}  // namespace sublevel
