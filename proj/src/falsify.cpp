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

#include "sublevel/falsify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sublevel/error.hpp"

namespace sublevel {
namespace {

class GridFit {
 public:
  GridFit(const Activation& basis, const std::function<double(double)>& target,
          const FalsifyOptions& opts)
      : basis_(basis), grid_(opts.grid_points), target_(opts.grid_points) {
    const double h = opts.grid_half_width;
    const double step = 2.0 * h / static_cast<double>(opts.grid_points - 1);
    for (int k = 0; k < opts.grid_points; ++k) {
      grid_(k) = -h + step * k;
      target_(k) = target(grid_(k));
    }
    target_norm_ = target_.norm();
  }

  const Vector& grid() const { return grid_; }
  const Vector& target() const { return target_; }

  double residual(const std::vector<double>& shifts) const {
    Matrix phi(grid_.size(), static_cast<Index>(shifts.size()));
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      for (Index k = 0; k < grid_.size(); ++k) {
        phi(k, static_cast<Index>(i)) = basis_(grid_(k) - shifts[i]);
      }
    }
    Vector lambda = phi.completeOrthogonalDecomposition().solve(target_);
    double r = (target_ - phi * lambda).norm();
    return target_norm_ > 0.0 ? r / target_norm_ : r;
  }

 private:
  const Activation& basis_;
  Vector grid_;
  Vector target_;
  double target_norm_ = 0.0;
};

bool admissible(const std::vector<double>& a, double min_shift, double bound) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) < min_shift || std::abs(a[i]) > bound) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(a[i] - a[j]) < min_shift) return false;
    }
  }
  return true;
}

// Kink locations of the sampled target: clusters of nonzero second
// differences, each resolved by intersecting the lines on either side.
std::vector<double> target_kinks(const Vector& x, const Vector& t) {
  const Index n = x.size();
  std::vector<double> kinks;
  if (n < 4) return kinks;
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  auto bent = [&](Index k) {
    return std::abs(t(k - 1) - 2.0 * t(k) + t(k + 1)) > 1e-9 * scale;
  };
  Index k = 1;
  while (k < n - 1) {
    if (!bent(k)) {
      ++k;
      continue;
    }
    Index s = k;
    while (k < n - 1 && bent(k)) ++k;
    Index e = k - 1;
    if (s == e) {
      kinks.push_back(x(s));
    } else if (s >= 1 && e + 1 < n) {
      double ml = (t(s) - t(s - 1)) / (x(s) - x(s - 1));
      double mr = (t(e + 1) - t(e)) / (x(e + 1) - x(e));
      if (ml != mr) {
        // t(s) + ml (z - x_s) = t(e) + mr (z - x_e)
        kinks.push_back((t(e) - t(s) + ml * x(s) - mr * x(e)) / (ml - mr));
      }
    }
  }
  return kinks;
}

// Compass search on the shifts, step halving on failure.
double pattern_search(const GridFit& fit, std::vector<double>& a,
                      const FalsifyOptions& opts, double bound) {
  double best = fit.residual(a);
  double step = 0.25;
  for (int it = 0; it < opts.local_iterations && step > 1e-13; ++it) {
    bool improved = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (double dir : {1.0, -1.0}) {
        std::vector<double> trial = a;
        trial[i] += dir * step;
        if (!admissible(trial, opts.min_shift, bound)) continue;
        double r = fit.residual(trial);
        if (r < best) {
          best = r;
          a = std::move(trial);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

void combinations(const std::vector<double>& pool, int p, std::size_t limit,
                  std::vector<std::vector<double>>& out) {
  std::vector<int> idx(static_cast<std::size_t>(p));
  const int n = static_cast<int>(pool.size());
  if (p > n) return;
  for (int i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (out.size() < limit) {
    std::vector<double> pick;
    for (int i : idx) pick.push_back(pool[static_cast<std::size_t>(i)]);
    out.push_back(std::move(pick));
    int i = p - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - p + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < p; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace

FalsifyReport shifted_fit_search(const Activation& basis,
                                 const std::function<double(double)>& target,
                                 const FalsifyOptions& options) {
  require(options.p_max >= 1, ErrorCode::kInvalidArgument, "p_max must be >= 1");
  require(options.grid_points >= 4, ErrorCode::kInvalidArgument,
          "grid needs at least 4 points");
  require(options.grid_half_width > 0.0, ErrorCode::kInvalidArgument,
          "grid half width must be positive");
  GridFit fit(basis, target, options);
  const double bound = 2.0 * options.grid_half_width;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-options.grid_half_width,
                                                 options.grid_half_width);

  std::vector<double> pool;
  for (double kt : target_kinks(fit.grid(), fit.target())) {
    for (double kb : basis.breakpoints()) {
      double a = kt - kb;
      if (admissible({a}, options.min_shift, bound)) pool.push_back(a);
    }
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  FalsifyReport report;
  report.min_residual = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= options.p_max; ++p) {
    std::vector<std::vector<double>> starts;
    combinations(pool, p, 2000, starts);
    for (int t = 0; t < options.trials; ++t) {
      std::vector<double> a(static_cast<std::size_t>(p));
      for (int attempt = 0; attempt < 1000; ++attempt) {
        for (double& v : a) v = uniform(rng);
        if (admissible(a, options.min_shift, bound)) break;
      }
      if (admissible(a, options.min_shift, bound)) starts.push_back(std::move(a));
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_shifts;
    for (std::vector<double>& a : starts) {
      if (!admissible(a, options.min_shift, bound)) continue;
      double r = pattern_search(fit, a, options, bound);
      if (r < best) {
        best = r;
        best_shifts = a;
      }
    }
    report.best_residual.push_back(best);
    report.best_shifts.push_back(best_shifts);
    report.min_residual = std::min(report.min_residual, best);
  }
  report.consistent = report.min_residual > 1e-3;
  report.violated = report.min_residual < 1e-8;
  return report;
}

FalsifyReport a2_falsify(const Activation& activation,
                         const FalsifyOptions& options) {
  return shifted_fit_search(
      activation, [&activation](double x) { return activation(x); }, options);
}

}  // namespace sublevel
