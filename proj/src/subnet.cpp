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

// Connection of the layers above the first hidden layer.
//
// With full-row-rank input Z, the first pre-activation Z W + 1 b^T can be set
// to anything, so the first hidden features are free. Once the weights of
// layers 2..m have full column rank, the features of layer m are free too:
// a prescribed feature curve is realized by pushing its pre-image down
// through pseudo-inverses (Segment::FeatureLift).
//
// Each endpoint is moved, at constant output, to a waypoint that depends only
// on its output: fixed full-column-rank weights above the first layer, zero
// hidden biases, and features with no component in the null space of the next
// layer. The two waypoints are then joined by interpolating the last hidden
// features linearly, which interpolates the output linearly; convexity of the
// loss bounds that segment by the larger endpoint loss.

#include <cmath>
#include <optional>

#include "sublevel/construct.hpp"
#include "sublevel/error.hpp"
#include "sublevel/training.hpp"
#include "sublevel/verify.hpp"

namespace sublevel {
namespace {

// Tall Gaussian weights whose leading square block is invertible.
Matrix canonical_weight(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  for (;;) {
    Matrix W = Matrix::NullaryExpr(rows, cols, [&]() { return scale * normal(rng); });
    if (numeric_rank(W.topRows(cols), 1e-6).rank == cols) return W;
  }
}

class TailCanonicalizer {
 public:
  TailCanonicalizer(const NetworkSpec& spec, const DataSet& data,
                    const Tolerances& tol, std::uint64_t seed)
      : spec_(spec), tol_(tol) {
    auto ctx = std::make_shared<LiftContext>(
        LiftContext{data.X(), pseudo_inverse(data.X()), spec.activation()});
    context_ = std::move(ctx);
    Rng rng(seed);
    canonical_.resize(spec.depth());
    for (std::size_t l = 1; l < spec.depth(); ++l) {
      canonical_[l] = canonical_weight(spec.width(l), spec.width(l + 1), rng);
    }
  }

  const std::shared_ptr<const LiftContext>& context() const { return context_; }

  ParamPath reduce(const Theta& start) {
    path_.reset();
    current_ = start;
    const std::size_t depth = spec_.depth();
    for (std::size_t l = 1; l < depth; ++l) {
      align_rows(l);
      if (l + 1 < depth) clear_bias(l);
    }
    for (std::size_t m = depth - 1; m >= 1; --m) project_features(m);
    settle_first_layer();
    if (!path_) path_.emplace(Segment::constant(start));
    return std::move(*path_);
  }

  Matrix features(const Theta& theta, std::size_t hidden) const {
    return forward(spec_, theta, context_->input)[hidden];
  }

 private:
  void push(Segment s) {
    if (path_) {
      path_->append(std::move(s));
    } else {
      path_.emplace(std::move(s));
    }
    current_ = path_->end();
  }

  void lift(std::size_t hidden, MatrixCurve curve, bool transposed,
            const Theta& co_end) {
    push(Segment::feature_lift(current_, hidden, std::move(curve), transposed,
                               co_end, context_, true));
  }

  static bool negligible(const Matrix& m, const Matrix& scale_of) {
    double scale = 1.0 + (scale_of.size() ? scale_of.cwiseAbs().maxCoeff() : 0.0);
    return m.size() == 0 || m.cwiseAbs().maxCoeff() <= 1e-13 * scale;
  }

  // Rows of W_l are the "features" here and the columns of G_l (the hidden
  // features feeding W_l) are their outgoing weights: G_l W_l is preserved
  // exactly as F W is preserved in the first-layer alignment.
  void align_rows(std::size_t l) {
    const Matrix& target = canonical_[l];
    const Index rows = target.rows();
    for (Index k = 0; k < rows; ++k) {
      if ((current_.layers[l].W.row(k).array() == target.row(k).array()).all()) {
        continue;
      }
      Matrix At = current_.layers[l].W.transpose();
      std::optional<Index> found;
      Matrix E;
      for (Index q = k; q < rows && !found; ++q) {
        IndexList basis(static_cast<std::size_t>(q));
        for (Index i = 0; i < q; ++i) basis[static_cast<std::size_t>(i)] = i;
        try {
          E = span_coefficients(At, basis, {q}, tol_.feas_tol);
          found = q;
        } catch (const InfeasibleError&) {
        }
      }
      if (!found) {
        fail(ErrorCode::kNoDependentColumn,
             "no dependent row in layer " + std::to_string(l + 1) +
                 " weights at or after row " + std::to_string(k));
      }
      const Index j = *found;
      IndexList basis(static_cast<std::size_t>(j));
      for (Index i = 0; i < j; ++i) basis[static_cast<std::size_t>(i)] = i;

      Matrix G = features(current_, l);
      if (!negligible(G.col(j), G)) {
        lift(l,
             zero_dependent_rows(At, G.transpose(), basis, {j}, E,
                                 tol_.feas_tol),
             true, current_);
      }
      if (j != k) {
        Theta copied = current_;
        copied.layers[l].W.row(j) = current_.layers[l].W.row(k);
        push(Segment::linear(current_, copied, true));
        G = features(current_, l);
        if (!negligible(G.col(k), G)) {
          G.col(j).setZero();
          lift(l,
               transfer_neuron(current_.layers[l].W.transpose(), G.transpose(),
                               j, k),
               true, current_);
        }
      }
      Theta placed = current_;
      placed.layers[l].W.row(k) = target.row(k);
      push(Segment::linear(current_, placed, true));
    }
  }

  // b_l -> 0 while G_{l} absorbs the shift through pinv(W_l).
  void clear_bias(std::size_t l) {
    const Vector& b = current_.layers[l].b;
    if (b.isZero(0.0)) return;
    Matrix G = features(current_, l);
    Eigen::RowVectorXd shift = b.transpose() * pseudo_inverse(current_.layers[l].W);
    Matrix G_end = G.rowwise() + shift;
    Theta co_end = current_;
    co_end.layers[l].b.setZero();
    lift(l, MatrixCurve::line(G, G_end), false, co_end);
  }

  // G_m -> G_m W_m pinv(W_m), dropping the part W_m annihilates.
  void project_features(std::size_t m) {
    const Matrix& W = current_.layers[m].W;
    Matrix G = features(current_, m);
    Matrix G_end = G * (W * pseudo_inverse(W));
    if (negligible(G - G_end, G)) return;
    lift(m, MatrixCurve::line(G, G_end), false, current_);
  }

  // (W_1, b_1) -> (pinv(Z) H_1, 0) with H_1 = Z W_1 + 1 b_1^T unchanged.
  void settle_first_layer() {
    Matrix H = context_->input * current_.layers[0].W;
    H.rowwise() += current_.layers[0].b.transpose();
    Theta settled = current_;
    settled.layers[0].W = context_->input_pinv * H;
    settled.layers[0].b.setZero();
    if (exactly_equal(settled, current_)) return;
    push(Segment::linear(current_, settled, true));
  }

  const NetworkSpec& spec_;
  Tolerances tol_;
  std::shared_ptr<const LiftContext> context_;
  std::vector<Matrix> canonical_;
  std::optional<ParamPath> path_;
  Theta current_;
};

ParamPath feature_canonical_path(const NetworkSpec& spec, const DataSet& data,
                                 const Theta& a, const Theta& b,
                                 const SubnetOptions& options) {
  TailCanonicalizer canon(spec, data, options.tol, options.canonical_seed);
  ParamPath path = canon.reduce(a);
  ParamPath back = canon.reduce(b);
  const Theta& wa = path.end();
  const Theta& wb = back.end();
  const std::size_t top = spec.depth() - 1;
  Segment bridge = Segment::feature_lift(
      wa, top,
      MatrixCurve::line(canon.features(wa, top), canon.features(wb, top)),
      false, wa, canon.context(), false);
  Theta reached = bridge.end();
  path.append(std::move(bridge));
  if (!exactly_equal(reached, wb)) {
    // Rounding-level gap between the realized and the reduced waypoint.
    path.append(Segment::linear(reached, wb, false));
  }
  path.append(back.reversed());
  return path;
}

// Widths strictly decrease from the first hidden layer to the output.
bool narrowing_above_input(const NetworkSpec& spec) {
  for (std::size_t l = 1; l < spec.depth(); ++l) {
    if (spec.width(l) <= spec.width(l + 1)) return false;
  }
  return true;
}

}  // namespace

std::string regime_name(SubnetRegime regime) {
  switch (regime) {
    case SubnetRegime::kAuto:
      return "auto";
    case SubnetRegime::kLastLayerLine:
      return "last_layer_line";
    case SubnetRegime::kFeatureCanonical:
      return "feature_canonical";
    case SubnetRegime::kHomotopy:
      return "homotopy";
  }
  return "unknown";
}

SubnetResult subnet_connect(const NetworkSpec& spec, const DataSet& data,
                            const Theta& a, const Theta& b, double alpha,
                            const SubnetOptions& options) {
  validate_theta(spec, a);
  validate_theta(spec, b);
  const Tolerances& tol = options.tol;
  require(numeric_rank(data.X(), tol.rank_tol_rel).rank == data.samples(),
          ErrorCode::kPrecondition,
          "subnet_connect needs input data of full row rank");
  double la = loss(spec, a, data);
  double lb = loss(spec, b, data);
  // Endpoints arrive through output-preserving moves, so their losses may
  // sit a rounding error above alpha.
  require(la <= alpha + tol.verify_tol && lb <= alpha + tol.verify_tol,
          ErrorCode::kPrecondition,
          "alpha is below an endpoint loss (" + format_double(std::max(la, lb)) +
              " > " + format_double(alpha) + ")");

  VerifyOptions vopt;
  vopt.samples_per_segment = options.verify_samples;
  vopt.verify_tol = tol.verify_tol;
  vopt.inv_tol = tol.inv_tol;

  if (exactly_equal(a, b)) {
    return {ParamPath(Segment::constant(a)), SubnetRegime::kLastLayerLine,
            std::max(la, lb)};
  }

  SubnetRegime regime = options.regime;
  if (regime == SubnetRegime::kAuto) {
    if (spec.depth() == 1) {
      regime = SubnetRegime::kLastLayerLine;
    } else if (narrowing_above_input(spec)) {
      regime = SubnetRegime::kFeatureCanonical;
    } else {
      regime = SubnetRegime::kHomotopy;
    }
  }

  std::string why;
  if (regime == SubnetRegime::kLastLayerLine ||
      regime == SubnetRegime::kFeatureCanonical) {
    try {
      if (regime == SubnetRegime::kLastLayerLine) {
        require(spec.depth() == 1, ErrorCode::kPrecondition,
                "a last-layer line needs a depth-one subnetwork");
      } else {
        require(narrowing_above_input(spec), ErrorCode::kPrecondition,
                "the canonical waypoint construction needs strictly "
                "decreasing widths above the first layer");
      }
      ParamPath path = regime == SubnetRegime::kLastLayerLine
                           ? ParamPath(Segment::linear(a, b, false))
                           : feature_canonical_path(spec, data, a, b, options);
      PathReport report = verify_path(spec, data, path, a, b, alpha, vopt);
      if (report.passed) return {std::move(path), regime, report.max_loss};
      why = regime_name(regime) + " path failed verification (max loss " +
            format_double(report.max_loss) + ")";
    } catch (const Error& e) {
      why = regime_name(regime) + " construction failed: " + e.what();
    }
    if (options.regime != SubnetRegime::kAuto) {
      fail(ErrorCode::kHomotopyFailed, why);
    }
  }

  HomotopyResult h = optimize_knot_path(spec, data, a, b, alpha, options.homotopy);
  ParamPath path = knots_to_path(h.knots);
  PathReport report = verify_path(spec, data, path, a, b, alpha, vopt);
  if (!report.passed) {
    fail(ErrorCode::kHomotopyFailed,
         (why.empty() ? std::string() : why + "; ") +
             "no verified path found (homotopy max loss " +
             format_double(report.max_loss) + " vs alpha " +
             format_double(alpha) + ")");
  }
  return {std::move(path), SubnetRegime::kHomotopy, report.max_loss};
}

}  // namespace sublevel
