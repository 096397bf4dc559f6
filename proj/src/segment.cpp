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

#include <cmath>

#include "sublevel/error.hpp"
#include "sublevel/path.hpp"

namespace sublevel {
namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

bool same_shapes(const Theta& a, const Theta& b) {
  if (a.depth() != b.depth()) return false;
  for (std::size_t l = 0; l < a.depth(); ++l) {
    if (a.layers[l].W.rows() != b.layers[l].W.rows() ||
        a.layers[l].W.cols() != b.layers[l].W.cols() ||
        a.layers[l].b.size() != b.layers[l].b.size()) {
      return false;
    }
  }
  return true;
}

// Hidden features G_1..G_upto of a bare stack of layers. Same arithmetic
// as forward() so reference values agree bit for bit.
std::vector<Matrix> stack_features(const Theta& theta, const Matrix& input,
                                   const Activation& act, std::size_t upto) {
  std::vector<Matrix> out;
  Matrix current = input;
  for (std::size_t l = 0; l < upto; ++l) {
    Matrix pre = current * theta.layers[l].W;
    pre.rowwise() += theta.layers[l].b.transpose();
    current = act.apply(pre);
    out.push_back(current);
  }
  return out;
}

Theta prepend(const std::vector<Layer>& prefix, const Theta& inner) {
  Theta out;
  out.layers = prefix;
  out.layers.insert(out.layers.end(), inner.layers.begin(), inner.layers.end());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// MatrixCurve

MatrixCurve MatrixCurve::line(Matrix start, Matrix end) {
  require(start.rows() == end.rows() && start.cols() == end.cols(),
          ErrorCode::kDimensionMismatch, "line endpoints differ in shape");
  MatrixCurve c;
  c.kind_ = Kind::kLine;
  c.start_ = std::move(start);
  c.end_ = std::move(end);
  return c;
}

MatrixCurve MatrixCurve::zero_dependent_rows(Matrix W, IndexList basis,
                                             IndexList dependent, Matrix E) {
  require(E.rows() == static_cast<Index>(basis.size()) &&
              E.cols() == static_cast<Index>(dependent.size()),
          ErrorCode::kDimensionMismatch,
          "span coefficients must be |basis| x |dependent|");
  for (const IndexList* set : {&basis, &dependent}) {
    for (Index r : *set) {
      require(r >= 0 && r < W.rows(), ErrorCode::kInvalidArgument,
              "row index out of range");
    }
  }
  MatrixCurve c;
  c.kind_ = Kind::kZeroDependentRows;
  c.start_ = std::move(W);
  c.basis_ = std::move(basis);
  c.dependent_ = std::move(dependent);
  c.E_ = std::move(E);
  c.end_ = c.evaluate(1.0);
  return c;
}

MatrixCurve MatrixCurve::transfer_neuron(Matrix W, Index j, Index k) {
  require(j >= 0 && j < W.rows() && k >= 0 && k < W.rows(),
          ErrorCode::kInvalidArgument, "neuron index out of range");
  require(j != k, ErrorCode::kInvalidArgument,
          "transfer_neuron needs two distinct neurons");
  MatrixCurve c;
  c.kind_ = Kind::kTransferNeuron;
  c.start_ = std::move(W);
  c.j_ = j;
  c.k_ = k;
  c.end_ = c.evaluate(1.0);
  return c;
}

Matrix MatrixCurve::at(double lambda) const {
  if (lambda == 0.0) return start_;
  if (lambda == 1.0) return end_;
  return evaluate(lambda);
}

Matrix MatrixCurve::evaluate(double lambda) const {
  switch (kind_) {
    case Kind::kLine:
      return (1.0 - lambda) * start_ + lambda * end_;
    case Kind::kZeroDependentRows: {
      Matrix out = start_;
      if (dependent_.empty()) return out;
      Matrix dep = select_rows(start_, dependent_);
      Matrix shift = E_ * dep;
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        out.row(basis_[i]) =
            start_.row(basis_[i]) + lambda * shift.row(static_cast<Index>(i));
      }
      for (Index r : dependent_) out.row(r) = (1.0 - lambda) * start_.row(r);
      return out;
    }
    case Kind::kTransferNeuron: {
      Matrix out = start_;
      out.row(k_) = (1.0 - lambda) * start_.row(k_);
      out.row(j_) = lambda * start_.row(k_);
      return out;
    }
  }
  return start_;
}

// ---------------------------------------------------------------------------
// Segment

Segment Segment::linear(Theta start, Theta end, bool output_preserving) {
  require(same_shapes(start, end), ErrorCode::kDimensionMismatch,
          "linear segment endpoints differ in shape");
  Segment s;
  s.start_ = std::move(start);
  s.end_ = std::move(end);
  s.output_preserving_ = output_preserving;
  s.payload_ = Linear{};
  return s;
}

Segment Segment::constant(const Theta& at) { return linear(at, at, true); }

Segment Segment::block_curve(const Theta& start, std::size_t layer,
                             MatrixCurve curve) {
  require(layer < start.depth(), ErrorCode::kInvalidArgument,
          "block curve layer out of range");
  require(same_matrix(curve.start(), start.layers[layer].W),
          ErrorCode::kInternal,
          "block curve does not start at the current weights");
  Segment s;
  s.start_ = start;
  s.end_ = start;
  s.end_.layers[layer].W = curve.end();
  s.output_preserving_ = curve.kind() != MatrixCurve::Kind::kLine;
  s.payload_ = BlockCurve{layer, std::move(curve)};
  return s;
}

Segment Segment::feature_lift(const Theta& start, std::size_t hidden,
                              MatrixCurve curve, bool transposed, Theta co_end,
                              std::shared_ptr<const LiftContext> context,
                              bool output_preserving) {
  require(context != nullptr, ErrorCode::kInvalidArgument,
          "feature lift needs a context");
  require(hidden >= 1 && hidden < start.depth(), ErrorCode::kInvalidArgument,
          "feature lift must target a hidden layer");
  require(same_shapes(start, co_end), ErrorCode::kDimensionMismatch,
          "feature lift co-move target differs in shape");
  for (std::size_t l = 0; l < hidden; ++l) {
    require(same_matrix(start.layers[l].W, co_end.layers[l].W) &&
                same_matrix(start.layers[l].b, co_end.layers[l].b),
            ErrorCode::kInternal,
            "feature lift co-moves must leave the lifted layers alone");
  }
  const Activation& act = context->activation;

  FeatureLift lift{hidden, std::move(curve), transposed, std::move(co_end),
                   context, {}, {}, {}};
  lift.ref_features = stack_features(start, context->input, act, hidden);
  Matrix g0 = transposed ? Matrix(lift.curve.start().transpose())
                         : lift.curve.start();
  const Matrix& actual = lift.ref_features.back();
  require(g0.rows() == actual.rows() && g0.cols() == actual.cols(),
          ErrorCode::kDimensionMismatch,
          "feature curve has the wrong shape for the lifted layer");
  double scale = 1.0 + actual.cwiseAbs().maxCoeff();
  require((g0 - actual).cwiseAbs().maxCoeff() <= 1e-9 * scale,
          ErrorCode::kInternal,
          "feature curve does not start at the realized features");
  for (std::size_t k = 0; k < hidden; ++k) {
    lift.ref_preimages.push_back(
        act.apply_inverse(k + 1 == hidden ? g0 : lift.ref_features[k]));
  }
  for (std::size_t k = 1; k < hidden; ++k) {
    const Matrix& W = start.layers[k].W;
    require(numeric_rank(W).rank == W.cols(), ErrorCode::kPrecondition,
            "feature lift needs full-column-rank weights below the lifted "
            "layer (layer " + std::to_string(k + 1) + ")");
    lift.weight_pinv.push_back(pseudo_inverse(W));
  }

  Segment s;
  s.start_ = start;
  s.output_preserving_ = output_preserving;
  s.payload_ = std::move(lift);
  s.end_ = s.evaluate(1.0);
  return s;
}

Segment Segment::embedded(std::vector<Layer> prefix, Segment inner) {
  Segment s;
  s.start_ = prepend(prefix, inner.start());
  s.end_ = prepend(prefix, inner.end());
  s.output_preserving_ = inner.output_preserving();
  s.payload_ = Embedded{std::move(prefix),
                        std::make_shared<const Segment>(std::move(inner))};
  return s;
}

Segment::Kind Segment::kind() const {
  return static_cast<Kind>(payload_.index());
}

std::string Segment::kind_name() const {
  switch (kind()) {
    case Kind::kLinear:
      return "linear";
    case Kind::kBlockCurve: {
      const auto& bc = std::get<BlockCurve>(payload_);
      switch (bc.curve.kind()) {
        case MatrixCurve::Kind::kZeroDependentRows:
          return "zero_dependent_rows";
        case MatrixCurve::Kind::kTransferNeuron:
          return "transfer_neuron";
        case MatrixCurve::Kind::kLine:
          return "block_line";
      }
      return "block_curve";
    }
    case Kind::kFeatureLift:
      return "feature_lift";
    case Kind::kEmbedded:
      return "embedded:" + std::get<Embedded>(payload_).inner->kind_name();
  }
  return "unknown";
}

Theta Segment::at(double lambda) const {
  if (lambda == 0.0) return start();
  if (lambda == 1.0) return end();
  return evaluate(reversed_ ? 1.0 - lambda : lambda);
}

Theta Segment::evaluate(double lambda) const {
  switch (kind()) {
    case Kind::kLinear:
      return lerp(start_, end_, lambda);
    case Kind::kBlockCurve: {
      const auto& bc = std::get<BlockCurve>(payload_);
      Theta out = start_;
      out.layers[bc.layer].W = bc.curve.at(lambda);
      return out;
    }
    case Kind::kFeatureLift: {
      const auto& lift = std::get<FeatureLift>(payload_);
      const Activation& act = lift.context->activation;
      Theta out = lerp(start_, lift.co_end, lambda);
      Matrix g = lift.curve.at(lambda);
      if (lift.transposed) g.transposeInPlace();
      Matrix dH = act.apply_inverse(g) - lift.ref_preimages[lift.hidden - 1];
      for (std::size_t k = lift.hidden - 1; k >= 1; --k) {
        Matrix lower = lift.ref_features[k - 1] + dH * lift.weight_pinv[k - 1];
        dH = act.apply_inverse(lower) - lift.ref_preimages[k - 1];
      }
      out.layers[0].W = start_.layers[0].W + lift.context->input_pinv * dH;
      return out;
    }
    case Kind::kEmbedded: {
      const auto& emb = std::get<Embedded>(payload_);
      return prepend(emb.prefix, emb.inner->at(lambda));
    }
  }
  return start_;
}

std::vector<std::string> Segment::touched_blocks() const {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < start_.depth(); ++l) {
    if (!same_matrix(start_.layers[l].W, end_.layers[l].W)) {
      out.push_back("W" + std::to_string(l + 1));
    }
    if (!same_matrix(start_.layers[l].b, end_.layers[l].b)) {
      out.push_back("b" + std::to_string(l + 1));
    }
  }
  return out;
}

Segment Segment::reversed() const {
  Segment s = *this;
  s.reversed_ = !reversed_;
  return s;
}

}  // namespace sublevel
