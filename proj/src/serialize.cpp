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

#include "sublevel/serialize.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sublevel/error.hpp"

namespace sublevel {
namespace {

double number(const Json& j) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) fail(ErrorCode::kIo, "expected a number in JSON input");
  return j.get<double>();
}

Index count(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(ErrorCode::kIo, std::string("field '") + key +
                             "' must be a non-negative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

Json index_list(const IndexList& l) {
  Json out = Json::array();
  for (Index i : l) out.push_back(static_cast<long long>(i));
  return out;
}

IndexList index_list_from(const Json& j) {
  IndexList out;
  for (const Json& v : j) out.push_back(static_cast<Index>(v.get<long long>()));
  return out;
}

Json layers_to_json(const std::vector<Layer>& layers) {
  Json out = Json::array();
  for (const Layer& l : layers) {
    out.push_back({{"W", matrix_to_json(l.W)}, {"b", matrix_to_json(l.b)}});
  }
  return out;
}

std::vector<Layer> layers_from_json(const Json& j) {
  std::vector<Layer> out;
  for (const Json& l : j) {
    Matrix b = matrix_from_json(l.at("b"));
    out.push_back({matrix_from_json(l.at("W")), Vector(b.reshaped())});
  }
  return out;
}

const char* curve_kind(MatrixCurve::Kind k) {
  switch (k) {
    case MatrixCurve::Kind::kLine:
      return "line";
    case MatrixCurve::Kind::kZeroDependentRows:
      return "zero_dependent_rows";
    case MatrixCurve::Kind::kTransferNeuron:
      return "transfer_neuron";
  }
  return "line";
}

// The start matrix is omitted when the owner already stores it.
Json curve_to_json(const MatrixCurve& c, bool with_start) {
  Json out = {{"kind", curve_kind(c.kind())}};
  if (with_start) out["start"] = matrix_to_json(c.start());
  switch (c.kind()) {
    case MatrixCurve::Kind::kLine:
      out["end"] = matrix_to_json(c.end());
      break;
    case MatrixCurve::Kind::kZeroDependentRows:
      out["basis"] = index_list(c.basis());
      out["dependent"] = index_list(c.dependent());
      out["E"] = matrix_to_json(c.coefficients());
      break;
    case MatrixCurve::Kind::kTransferNeuron:
      out["j"] = static_cast<long long>(c.destination());
      out["k"] = static_cast<long long>(c.source());
      break;
  }
  return out;
}

MatrixCurve curve_from_json(const Json& j, Matrix start) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "line") {
    return MatrixCurve::line(std::move(start), matrix_from_json(j.at("end")));
  }
  if (kind == "zero_dependent_rows") {
    return MatrixCurve::zero_dependent_rows(
        std::move(start), index_list_from(j.at("basis")),
        index_list_from(j.at("dependent")), matrix_from_json(j.at("E")));
  }
  if (kind == "transfer_neuron") {
    return MatrixCurve::transfer_neuron(std::move(start), count(j, "j"),
                                        count(j, "k"));
  }
  fail(ErrorCode::kIo, "unknown curve kind '" + kind + "'");
}

class PathWriter {
 public:
  Json segment(const Segment& s) {
    Json out;
    // label and touched_blocks are descriptive; loading ignores them.
    out["label"] = s.kind_name();
    out["touched_blocks"] = s.touched_blocks();
    out["reversed"] = s.is_reversed();
    out["output_preserving"] = s.output_preserving();
    std::visit([&](const auto& p) { describe(s, p, out); }, s.payload());
    return out;
  }
  Json contexts() const { return contexts_; }

 private:
  void describe(const Segment& s, const Segment::Linear&, Json& out) {
    out["kind"] = "linear";
    out["start"] = theta_to_json(s.forward_start());
    out["end"] = theta_to_json(s.forward_end());
  }
  void describe(const Segment& s, const Segment::BlockCurve& p, Json& out) {
    out["kind"] = "block_curve";
    out["start"] = theta_to_json(s.forward_start());
    out["layer"] = p.layer;
    out["curve"] = curve_to_json(p.curve, false);
  }
  void describe(const Segment& s, const Segment::FeatureLift& p, Json& out) {
    out["kind"] = "feature_lift";
    out["start"] = theta_to_json(s.forward_start());
    out["hidden"] = p.hidden;
    out["curve"] = curve_to_json(p.curve, true);
    out["transposed"] = p.transposed;
    out["co_end"] = theta_to_json(p.co_end);
    out["context"] = context_index(p.context.get());
  }
  void describe(const Segment&, const Segment::Embedded& p, Json& out) {
    out["kind"] = "embedded";
    out["prefix"] = layers_to_json(p.prefix);
    out["inner"] = segment(*p.inner);
  }

  std::size_t context_index(const LiftContext* ctx) {
    auto it = index_.find(ctx);
    if (it != index_.end()) return it->second;
    contexts_.push_back({{"input", matrix_to_json(ctx->input)},
                         {"input_pinv", matrix_to_json(ctx->input_pinv)},
                         {"activation", activation_to_json(ctx->activation)}});
    index_[ctx] = contexts_.size() - 1;
    return contexts_.size() - 1;
  }

  Json contexts_ = Json::array();
  std::map<const LiftContext*, std::size_t> index_;
};

Segment segment_from_json(
    const Json& j, const std::vector<std::shared_ptr<const LiftContext>>& ctx) {
  const std::string kind = j.at("kind").get<std::string>();
  const bool preserving = j.at("output_preserving").get<bool>();
  Segment s = [&]() -> Segment {
    if (kind == "linear") {
      return Segment::linear(theta_from_json(j.at("start")),
                             theta_from_json(j.at("end")), preserving);
    }
    if (kind == "block_curve") {
      Theta start = theta_from_json(j.at("start"));
      std::size_t layer = static_cast<std::size_t>(count(j, "layer"));
      require(layer < start.depth(), ErrorCode::kIo, "block curve layer out of range");
      MatrixCurve c = curve_from_json(j.at("curve"), start.layers[layer].W);
      return Segment::block_curve(start, layer, std::move(c));
    }
    if (kind == "feature_lift") {
      std::size_t idx = static_cast<std::size_t>(count(j, "context"));
      require(idx < ctx.size(), ErrorCode::kIo, "lift context index out of range");
      const Json& cj = j.at("curve");
      MatrixCurve c = curve_from_json(cj, matrix_from_json(cj.at("start")));
      return Segment::feature_lift(
          theta_from_json(j.at("start")), static_cast<std::size_t>(count(j, "hidden")),
          std::move(c), j.at("transposed").get<bool>(),
          theta_from_json(j.at("co_end")), ctx[idx], preserving);
    }
    if (kind == "embedded") {
      return Segment::embedded(layers_from_json(j.at("prefix")),
                               segment_from_json(j.at("inner"), ctx));
    }
    fail(ErrorCode::kIo, "unknown segment kind '" + kind + "'");
  }();
  return j.at("reversed").get<bool>() ? s.reversed() : s;
}

void dump_value(const Json& j, std::string& out, int indent) {
  auto newline = [&](int level) {
    out += '\n';
    out.append(static_cast<std::size_t>(2 * level), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float: {
      double v = j.get<double>();
      // "-0" would parse back as the integer 0 and lose its sign.
      if (!std::isfinite(v)) {
        out += "null";
      } else if (v == 0.0 && std::signbit(v)) {
        out += "-0.0";
      } else {
        out += format_double(v);
      }
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(indent + 1);
        out += Json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), out, indent + 1);
      }
      newline(indent);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Numeric arrays stay on one line.
      bool flat = true;
      for (const Json& v : j) flat = flat && v.is_primitive();
      out += '[';
      bool first = true;
      for (const Json& v : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(indent + 1);
        dump_value(v, out, indent + 1);
      }
      if (!flat) newline(indent);
      out += ']';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", static_cast<long long>(m.rows())},
          {"cols", static_cast<long long>(m.cols())},
          {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j) {
  const Index rows = count(j, "rows");
  const Index cols = count(j, "cols");
  const Json& data = j.at("data");
  require(data.is_array() && static_cast<Index>(data.size()) == rows * cols,
          ErrorCode::kIo, "matrix data length does not match rows * cols");
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = number(data[static_cast<std::size_t>(r * cols + c)]);
    }
  }
  return m;
}

Json activation_to_json(const Activation& a) {
  if (a.kind() == Activation::Kind::kLeakyRelu) {
    return {{"kind", "leaky_relu"}, {"slope", a.leaky_slope()}};
  }
  return {{"kind", "piecewise_linear"},
          {"breakpoints", a.breakpoints()},
          {"slopes", a.slopes()}};
}

Activation activation_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "leaky_relu") return Activation::leaky_relu(number(j.at("slope")));
  if (kind == "piecewise_linear") {
    return Activation::piecewise_linear(j.at("breakpoints").get<std::vector<double>>(),
                                        j.at("slopes").get<std::vector<double>>());
  }
  fail(ErrorCode::kIo, "unknown activation kind '" + kind + "'");
}

Json spec_to_json(const NetworkSpec& spec) {
  Json widths = Json::array();
  for (Index w : spec.widths()) widths.push_back(static_cast<long long>(w));
  return {{"widths", widths},
          {"activation", activation_to_json(spec.activation())},
          {"loss", spec.loss().name()}};
}

NetworkSpec spec_from_json(const Json& j) {
  std::vector<Index> widths;
  for (const Json& w : j.at("widths")) widths.push_back(w.get<long long>());
  return NetworkSpec(widths, activation_from_json(j.at("activation")),
                     make_loss(j.at("loss").get<std::string>()));
}

Json theta_to_json(const Theta& theta) {
  return {{"layers", layers_to_json(theta.layers)}};
}

Theta theta_from_json(const Json& j) {
  Theta t;
  t.layers = layers_from_json(j.at("layers"));
  return t;
}

Json dataset_to_json(const DataSet& data) {
  return {{"X", matrix_to_json(data.X())}, {"Y", matrix_to_json(data.Y())}};
}

DataSet dataset_from_json(const Json& j) {
  return DataSet::create(matrix_from_json(j.at("X")), matrix_from_json(j.at("Y")));
}

Json path_to_json(const ParamPath& path) {
  PathWriter writer;
  Json segments = Json::array();
  for (const Segment& s : path.segments()) segments.push_back(writer.segment(s));
  return {{"format", "sublevel-path"},
          {"version", 1},
          {"contexts", writer.contexts()},
          {"segments", std::move(segments)}};
}

ParamPath path_from_json(const Json& j) {
  try {
    require(j.at("format") == "sublevel-path", ErrorCode::kIo,
            "not a sublevel path file");
    std::vector<std::shared_ptr<const LiftContext>> contexts;
    for (const Json& c : j.at("contexts")) {
      contexts.push_back(std::make_shared<const LiftContext>(
          LiftContext{matrix_from_json(c.at("input")),
                      matrix_from_json(c.at("input_pinv")),
                      activation_from_json(c.at("activation"))}));
    }
    std::vector<Segment> segments;
    for (const Json& s : j.at("segments")) {
      segments.push_back(segment_from_json(s, contexts));
    }
    require(!segments.empty(), ErrorCode::kIo, "path has no segments");
    return ParamPath::unchecked(std::move(segments));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kIo, std::string("malformed path JSON: ") + e.what());
  }
}

Json report_to_json(const PathReport& r) {
  Json preserving = Json::array();
  for (bool b : r.output_preserving) preserving.push_back(b);
  return {{"passed", r.passed},
          {"max_loss", r.max_loss},
          {"bound", r.bound},
          {"n_samples", r.n_samples},
          {"endpoint_residuals", {r.endpoint_residuals.first, r.endpoint_residuals.second}},
          {"max_junction_gap", r.max_junction_gap},
          {"continuity_ok", r.continuity_ok},
          {"per_segment_invariance", r.per_segment_invariance},
          {"output_preserving", preserving},
          {"per_segment_max_loss", r.per_segment_max_loss}};
}

Json certificate_to_json(const DisconnectionCertificate& c) {
  return {{"valid", c.valid()},
          {"failure_reason", c.failure_reason()},
          {"index_set", index_list(c.index_set)},
          {"hidden_width", static_cast<long long>(c.hidden_width)},
          {"det_sign_theta", c.det_sign_theta},
          {"det_sign_theta_prime", c.det_sign_theta_prime},
          {"y_rank", static_cast<long long>(c.y_rank)},
          {"loss_theta", c.loss_theta},
          {"loss_theta_prime", c.loss_theta_prime},
          {"minimum_tol", c.minimum_tol}};
}

Json barrier_to_json(const BarrierScan& s) {
  return {{"straight", s.straight},
          {"resolved_midpoint", s.resolved_midpoint},
          {"optimized", s.optimized},
          {"barrier", s.barrier}};
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_value(j, out, 0);
  out += '\n';
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kIo, std::string("malformed JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write '" + path + "'");
  out << text;
  require(static_cast<bool>(out), ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace sublevel
