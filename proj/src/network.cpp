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

#include "sublevel/network.hpp"

#include <cmath>

#include "sublevel/error.hpp"

namespace sublevel {
namespace {

class SquareLoss final : public ConvexLoss {
 public:
  std::string name() const override { return "square"; }
  double value(const Matrix& p, const Matrix& y) const override {
    return (p - y).squaredNorm() / static_cast<double>(p.rows());
  }
  Matrix gradient(const Matrix& p, const Matrix& y) const override {
    return (2.0 / static_cast<double>(p.rows())) * (p - y);
  }
  void validate_targets(const Matrix&) const override {}
};

class CrossEntropyLoss final : public ConvexLoss {
 public:
  std::string name() const override { return "cross_entropy"; }

  double value(const Matrix& p, const Matrix& y) const override {
    double total = 0.0;
    for (Index i = 0; i < p.rows(); ++i) {
      double m = p.row(i).maxCoeff();
      double lse = m + std::log((p.row(i).array() - m).exp().sum());
      total += lse - p.row(i).dot(y.row(i));
    }
    return total / static_cast<double>(p.rows());
  }

  Matrix gradient(const Matrix& p, const Matrix& y) const override {
    Matrix g(p.rows(), p.cols());
    for (Index i = 0; i < p.rows(); ++i) {
      Eigen::RowVectorXd e = (p.row(i).array() - p.row(i).maxCoeff()).exp();
      g.row(i) = e / e.sum() - y.row(i);
    }
    return g / static_cast<double>(p.rows());
  }

  void validate_targets(const Matrix& y) const override {
    for (Index i = 0; i < y.rows(); ++i) {
      int ones = 0;
      for (Index j = 0; j < y.cols(); ++j) {
        double v = y(i, j);
        require(v == 0.0 || v == 1.0, ErrorCode::kInvalidArgument,
                "cross-entropy targets must be one-hot (row " +
                    std::to_string(i) + ")");
        ones += v == 1.0;
      }
      require(ones == 1, ErrorCode::kInvalidArgument,
              "cross-entropy targets must be one-hot (row " +
                  std::to_string(i) + ")");
    }
  }
};

void check_block(const Matrix& m, Index rows, Index cols, std::size_t layer,
                 const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(ErrorCode::kDimensionMismatch,
         std::string(what) + " of layer " + std::to_string(layer + 1) +
             " is " + std::to_string(m.rows()) + "x" +
             std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
             "x" + std::to_string(cols));
  }
  require(m.allFinite(), ErrorCode::kInvalidArgument,
          std::string(what) + " of layer " + std::to_string(layer + 1) +
              " has non-finite entries");
}

}  // namespace

std::shared_ptr<const ConvexLoss> make_loss(LossKind kind) {
  switch (kind) {
    case LossKind::kSquare:
      return std::make_shared<SquareLoss>();
    case LossKind::kCrossEntropy:
      return std::make_shared<CrossEntropyLoss>();
  }
  fail(ErrorCode::kInvalidArgument, "unknown loss kind");
}

std::shared_ptr<const ConvexLoss> make_loss(const std::string& name) {
  if (name == "square") return make_loss(LossKind::kSquare);
  if (name == "cross_entropy") return make_loss(LossKind::kCrossEntropy);
  fail(ErrorCode::kInvalidArgument, "unknown loss '" + name + "'");
}

NetworkSpec::NetworkSpec(std::vector<Index> widths, Activation activation,
                         std::shared_ptr<const ConvexLoss> loss)
    : widths_(std::move(widths)),
      activation_(std::move(activation)),
      loss_(std::move(loss)) {
  require(widths_.size() >= 2, ErrorCode::kInvalidArgument,
          "a network needs at least an input and an output width");
  for (Index w : widths_) {
    require(w >= 1, ErrorCode::kInvalidArgument, "widths must be >= 1");
  }
  require(loss_ != nullptr, ErrorCode::kInvalidArgument, "loss is null");
}

bool NetworkSpec::has_pyramidal_tail() const {
  for (std::size_t l = 3; l < widths_.size(); ++l) {
    if (widths_[l - 1] <= widths_[l]) return false;
  }
  return true;
}

NetworkSpec NetworkSpec::tail(std::size_t first) const {
  require(first < depth(), ErrorCode::kInvalidArgument,
          "tail must keep at least one layer");
  return NetworkSpec(
      std::vector<Index>(widths_.begin() + static_cast<std::ptrdiff_t>(first),
                         widths_.end()),
      activation_, loss_);
}

Index Theta::size() const {
  Index n = 0;
  for (const auto& l : layers) n += l.W.size() + l.b.size();
  return n;
}

Vector Theta::flatten() const {
  Vector out(size());
  Index at = 0;
  for (const auto& l : layers) {
    out.segment(at, l.W.size()) = l.W.reshaped();
    at += l.W.size();
    out.segment(at, l.b.size()) = l.b;
    at += l.b.size();
  }
  return out;
}

Theta Theta::unflatten(const Vector& flat) const {
  require(flat.size() == size(), ErrorCode::kDimensionMismatch,
          "flat parameter vector has the wrong length");
  Theta out = *this;
  Index at = 0;
  for (auto& l : out.layers) {
    l.W.reshaped() = flat.segment(at, l.W.size());
    at += l.W.size();
    l.b = flat.segment(at, l.b.size());
    at += l.b.size();
  }
  return out;
}

void validate_theta(const NetworkSpec& spec, const Theta& theta) {
  require(theta.depth() == spec.depth(), ErrorCode::kDimensionMismatch,
          "theta has " + std::to_string(theta.depth()) + " layers, spec has " +
              std::to_string(spec.depth()));
  for (std::size_t l = 0; l < theta.depth(); ++l) {
    const Layer& layer = theta.layers[l];
    check_block(layer.W, spec.width(l), spec.width(l + 1), l, "W");
    Index bias = (l + 1 == theta.depth()) ? 0 : spec.width(l + 1);
    check_block(layer.b, bias, 1, l, "b");
  }
}

bool exactly_equal(const Theta& a, const Theta& b) {
  if (a.depth() != b.depth()) return false;
  for (std::size_t l = 0; l < a.depth(); ++l) {
    const Layer& x = a.layers[l];
    const Layer& y = b.layers[l];
    if (x.W.rows() != y.W.rows() || x.W.cols() != y.W.cols() ||
        x.b.size() != y.b.size()) {
      return false;
    }
    if (!(x.W.array() == y.W.array()).all()) return false;
    if (!(x.b.array() == y.b.array()).all()) return false;
  }
  return true;
}

double max_abs_diff(const Theta& a, const Theta& b) {
  if (a.depth() != b.depth()) return INFINITY;
  double d = 0.0;
  for (std::size_t l = 0; l < a.depth(); ++l) {
    const Layer& x = a.layers[l];
    const Layer& y = b.layers[l];
    if (x.W.rows() != y.W.rows() || x.W.cols() != y.W.cols() ||
        x.b.size() != y.b.size()) {
      return INFINITY;
    }
    if (x.W.size() > 0) d = std::max(d, (x.W - y.W).cwiseAbs().maxCoeff());
    if (x.b.size() > 0) d = std::max(d, (x.b - y.b).cwiseAbs().maxCoeff());
  }
  return d;
}

double l2_norm(const Theta& theta) {
  double s = 0.0;
  for (const auto& l : theta.layers) s += l.W.squaredNorm() + l.b.squaredNorm();
  return std::sqrt(s);
}

Theta lerp(const Theta& a, const Theta& b, double t) {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  // Blocks that agree are copied, so untouched blocks stay bit-identical.
  Theta out = a;
  for (std::size_t l = 0; l < a.depth(); ++l) {
    const Layer& x = a.layers[l];
    const Layer& y = b.layers[l];
    if (!(x.W.array() == y.W.array()).all()) {
      out.layers[l].W = (1.0 - t) * x.W + t * y.W;
    }
    if (!(x.b.array() == y.b.array()).all()) {
      out.layers[l].b = (1.0 - t) * x.b + t * y.b;
    }
  }
  return out;
}

Theta random_theta(const NetworkSpec& spec, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Theta theta;
  for (std::size_t l = 0; l < spec.depth(); ++l) {
    Layer layer;
    double scale = 1.0 / std::sqrt(static_cast<double>(spec.width(l)));
    layer.W = Matrix::NullaryExpr(spec.width(l), spec.width(l + 1),
                                  [&]() { return scale * normal(rng); });
    if (l + 1 < spec.depth()) {
      layer.b = Vector::NullaryExpr(spec.width(l + 1),
                                    [&]() { return 0.5 * normal(rng); });
    }
    theta.layers.push_back(std::move(layer));
  }
  return theta;
}

DataSet DataSet::create(Matrix X, Matrix Y) {
  require(X.rows() >= 1, ErrorCode::kInvalidArgument,
          "data set needs at least one sample");
  require(X.rows() == Y.rows(), ErrorCode::kDimensionMismatch,
          "X and Y must have the same number of rows");
  require(X.allFinite() && Y.allFinite(), ErrorCode::kInvalidArgument,
          "data set has non-finite entries");
  require(check_distinct_rows(X, 0.0), ErrorCode::kPrecondition,
          "X must have pairwise distinct rows");
  return DataSet(std::move(X), std::move(Y));
}

bool check_distinct_rows(const Matrix& X, double tol) {
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = i + 1; j < X.rows(); ++j) {
      double d = X.cols() == 0 ? 0.0
                               : (X.row(i) - X.row(j)).cwiseAbs().maxCoeff();
      if (d <= tol) return false;
    }
  }
  return true;
}

std::vector<Matrix> forward(const NetworkSpec& spec, const Theta& theta,
                            const Matrix& X) {
  validate_theta(spec, theta);
  require(X.cols() == spec.input_dim(), ErrorCode::kDimensionMismatch,
          "input has " + std::to_string(X.cols()) +
              " columns, layer 1 expects " + std::to_string(spec.input_dim()));
  std::vector<Matrix> features;
  features.reserve(theta.depth() + 1);
  features.push_back(X);
  for (std::size_t l = 0; l < theta.depth(); ++l) {
    const Layer& layer = theta.layers[l];
    Matrix pre = features.back() * layer.W;
    if (l + 1 == theta.depth()) {
      features.push_back(std::move(pre));
    } else {
      pre.rowwise() += layer.b.transpose();
      features.push_back(spec.activation().apply(pre));
    }
  }
  return features;
}

Matrix network_output(const NetworkSpec& spec, const Theta& theta,
                      const Matrix& X) {
  return forward(spec, theta, X).back();
}

Matrix hidden_features(const NetworkSpec& spec, const Theta& theta,
                       const Matrix& X, std::size_t layer) {
  require(layer >= 1 && layer < spec.depth(), ErrorCode::kInvalidArgument,
          "hidden layer index out of range");
  return forward(spec, theta, X)[layer];
}

double loss(const NetworkSpec& spec, const Theta& theta, const DataSet& data) {
  spec.loss().validate_targets(data.Y());
  Matrix out = network_output(spec, theta, data.X());
  require(out.cols() == data.Y().cols(), ErrorCode::kDimensionMismatch,
          "targets have " + std::to_string(data.Y().cols()) +
              " columns, network outputs " + std::to_string(out.cols()));
  return spec.loss().value(out, data.Y());
}

DataSet generate_dataset(const NetworkSpec& spec, Index samples, Rng& rng) {
  require(samples >= 1, ErrorCode::kInvalidArgument, "need >= 1 sample");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix X;
  do {
    X = Matrix::NullaryExpr(samples, spec.input_dim(),
                            [&]() { return normal(rng); });
  } while (!check_distinct_rows(X, 1e-9));
  Matrix Y;
  if (spec.loss().name() == "cross_entropy") {
    std::uniform_int_distribution<Index> cls(0, spec.output_dim() - 1);
    Y = Matrix::Zero(samples, spec.output_dim());
    for (Index i = 0; i < samples; ++i) Y(i, cls(rng)) = 1.0;
  } else {
    Y = Matrix::NullaryExpr(samples, spec.output_dim(),
                            [&]() { return normal(rng); });
  }
  return DataSet::create(std::move(X), std::move(Y));
}

}  // namespace sublevel
