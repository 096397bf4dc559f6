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

#include "sublevel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sublevel/error.hpp"

namespace sublevel {
namespace {

double theta_distance(const Theta& a, const Theta& b) {
  return (a.flatten() - b.flatten()).norm();
}

// Bisects towards the larger half of the widest sampled step. A continuous
// curve's step shrinks geometrically; a jump does not.
bool continuity_spot_check(const Segment& seg, double lo, double hi,
                           double widest) {
  Theta a = seg.at(lo);
  Theta b = seg.at(hi);
  double scale = 1.0 + l2_norm(a);
  for (int i = 0; i < 40; ++i) {
    double mid = 0.5 * (lo + hi);
    Theta m = seg.at(mid);
    if (theta_distance(a, m) >= theta_distance(m, b)) {
      hi = mid;
      b = std::move(m);
    } else {
      lo = mid;
      a = std::move(m);
    }
  }
  return theta_distance(a, b) <= 1e-6 * widest + 1e-12 * scale;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double output_drift(const Matrix& a, const Matrix& reference) {
  return (a - reference).norm() / std::max(1.0, reference.norm());
}

PathReport verify_path(const NetworkSpec& spec, const DataSet& data,
                       const ParamPath& path, const Theta& requested_start,
                       const Theta& requested_end, double alpha,
                       const VerifyOptions& options) {
  require(options.samples_per_segment >= 2, ErrorCode::kInvalidArgument,
          "verification needs at least 2 samples per segment");
  PathReport report;
  report.bound = alpha;
  report.endpoint_residuals = {max_abs_diff(path.start(), requested_start),
                               max_abs_diff(path.end(), requested_end)};

  const int n = options.samples_per_segment;
  const auto& segments = path.segments();
  report.max_loss = -INFINITY;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& seg = segments[i];
    if (i > 0) {
      report.max_junction_gap = std::max(
          report.max_junction_gap, max_abs_diff(segments[i - 1].end(), seg.start()));
    }
    Matrix ref = network_output(spec, seg.start(), data.X());
    double seg_max = -INFINITY;
    double drift = 0.0;
    double widest = 0.0;
    double widest_lo = 0.0;
    Theta prev;
    for (int s = 0; s < n; ++s) {
      double lambda = static_cast<double>(s) / static_cast<double>(n - 1);
      Theta theta = seg.at(lambda);
      Matrix out = network_output(spec, theta, data.X());
      double value = spec.loss().value(out, data.Y());
      if (!std::isfinite(value)) value = INFINITY;
      seg_max = std::max(seg_max, value);
      drift = std::max(drift, output_drift(out, ref));
      if (s > 0) {
        double step = theta_distance(prev, theta);
        if (step > widest) {
          widest = step;
          widest_lo = static_cast<double>(s - 1) / static_cast<double>(n - 1);
        }
      }
      prev = std::move(theta);
      ++report.n_samples;
    }
    if (widest > 0.0 &&
        !continuity_spot_check(seg, widest_lo,
                               widest_lo + 1.0 / static_cast<double>(n - 1),
                               widest)) {
      report.continuity_ok = false;
    }
    report.per_segment_max_loss.push_back(seg_max);
    report.per_segment_invariance.push_back(drift);
    report.output_preserving.push_back(seg.output_preserving());
    report.max_loss = std::max(report.max_loss, seg_max);
  }

  bool ok = report.max_loss <= alpha + options.verify_tol;
  ok = ok && report.endpoint_residuals.first <= options.endpoint_tol &&
       report.endpoint_residuals.second <= options.endpoint_tol;
  ok = ok && report.max_junction_gap <= options.endpoint_tol;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (report.output_preserving[i] &&
        !(report.per_segment_invariance[i] <= options.inv_tol)) {
      ok = false;
    }
  }
  report.passed = ok && report.continuity_ok;
  return report;
}

PathReport verify_path(const NetworkSpec& spec, const DataSet& data,
                       const ParamPath& path, double alpha,
                       const VerifyOptions& options) {
  return verify_path(spec, data, path, path.start(), path.end(), alpha,
                     options);
}

void write_trace_csv(std::ostream& os, const NetworkSpec& spec,
                     const DataSet& data, const ParamPath& path,
                     int samples_per_segment) {
  require(samples_per_segment >= 2, ErrorCode::kInvalidArgument,
          "trace needs at least 2 samples per segment");
  os << "segment_index,lambda,loss,param_l2_norm,output_drift\n";
  const auto& segments = path.segments();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    Matrix ref = network_output(spec, segments[i].start(), data.X());
    for (int s = 0; s < samples_per_segment; ++s) {
      double lambda =
          static_cast<double>(s) / static_cast<double>(samples_per_segment - 1);
      Theta theta = segments[i].at(lambda);
      Matrix out = network_output(spec, theta, data.X());
      os << i << ',' << format_double(lambda) << ','
         << format_double(spec.loss().value(out, data.Y())) << ','
         << format_double(l2_norm(theta)) << ','
         << format_double(output_drift(out, ref)) << '\n';
    }
  }
}

}  // namespace sublevel
