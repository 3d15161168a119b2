// Copyright (c) 2026 The dysonlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dysonlab/dbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dysonlab/errors.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/rng.hpp"
#include "dysonlab/stats.hpp"

namespace dysonlab::dbm {

namespace {

bool strictly_increasing(const VectorXd& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (!(v(i) > v(i - 1)) || !std::isfinite(v(i))) return false;
  return std::isfinite(v(0));
}

}  // namespace

DbmState dbm_simulate(const DbmState& initial, double t_end, double dt, std::uint64_t seed,
                      const DbmOpts& opts) {
  if (initial.beta != 1 && initial.beta != 2)
    throw InvalidInput("dbm_simulate: beta must be 1 or 2");
  if (!strictly_increasing(initial.lambdas))
    throw InvalidInput("dbm_simulate: initial configuration must be strictly ordered");
  if (!(dt > 0.0)) throw InvalidInput("dbm_simulate: dt must be positive");
  if (t_end < initial.t) throw InvalidInput("dbm_simulate: t_end before initial time");

  const int n = static_cast<int>(initial.lambdas.size());
  DbmState state = initial;
  VectorXd drift(n), trial(n);
  std::uint64_t attempt = 0;
  const double noise_base = opts.noise_scale * std::sqrt(2.0 / (initial.beta * n));

  double t = state.t;
  double step = dt;
  while (t < t_end - 1e-15 * std::max(1.0, std::abs(t_end))) {
    const double h = std::min(step, t_end - t);
    kernels::pairwise_inv_sum(state.lambdas.data(), drift.data(), n);
    const double noise = noise_base * std::sqrt(h);
    for (int i = 0; i < n; ++i) {
      const double mu = -0.5 * state.lambdas(i) + drift(i) / n;
      trial(i) =
          state.lambdas(i) + h * mu + noise * crng::normal(seed, attempt, i, 0);
    }
    ++attempt;
    if (strictly_increasing(trial)) {
      state.lambdas.swap(trial);
      t += h;
      state.t = t;
      if (opts.observer) opts.observer(state);
      step = std::min(dt, 2.0 * step);
    } else {
      step *= 0.5;
      if (step < opts.dt_floor) {
        double min_gap = std::numeric_limits<double>::infinity();
        int at = 0;
        for (int i = 1; i < n; ++i)
          if (state.lambdas(i) - state.lambdas(i - 1) < min_gap) {
            min_gap = state.lambdas(i) - state.lambdas(i - 1);
            at = i;
          }
        throw StepFloor("dbm_simulate: dt fell below " + std::to_string(opts.dt_floor) +
                        " at t=" + std::to_string(t) + ", min gap " + std::to_string(min_gap) +
                        " between particles " + std::to_string(at - 1) + "," +
                        std::to_string(at));
      }
    }
  }
  state.t = t_end;
  return state;
}

GapSample normalized_gaps(const VectorXd& lambdas, const DensityCurve& d,
                          std::pair<double, double> window) {
  const int n = static_cast<int>(lambdas.size());
  GapSample out;
  out.window = window;
  for (int i = 0; i + 1 < n; ++i) {
    const double lam = lambdas(i);
    if (lam < window.first || lam > window.second) continue;
    const double rho = d.rho_at(lam);
    if (rho <= 0.0) continue;
    out.gaps.push_back(n * rho * (lambdas(i + 1) - lam));
  }
  if (out.gaps.empty()) throw EmptyWindow("normalized_gaps: window contains no gap");
  return out;
}

double gap_cdf_distance(const GapSample& a, const GapSample& b) {
  if (a.gaps.size() < 200 || b.gaps.size() < 200)
    throw TooFewGaps("gap_cdf_distance: both samples need >= 200 gaps");
  return stats::ks_two_sample(a.gaps, b.gaps);
}

double sine_kernel(double x) {
  const double px = std::numbers::pi * x;
  if (std::abs(px) < 1e-8) return 1.0 - px * px / 6.0;
  return std::sin(px) / px;
}

TwoPointCurve two_point_estimate(const std::vector<VectorXd>& spectra, const DensityCurve& d,
                                 double E, int bins) {
  if (spectra.size() < 200)
    throw InvalidInput("two_point_estimate: need >= 200 sampled spectra");
  if (bins < 4) throw InvalidInput("two_point_estimate: need >= 4 bins");
  const double alpha_max = 4.0;
  const double rho_e = d.rho_at(E);
  if (rho_e <= 0.0) throw InvalidInput("two_point_estimate: E outside the support");
  const int n = static_cast<int>(spectra.front().size());
  // reference window around E holding ~40 levels
  const double half_width = 20.0 / (n * rho_e);

  std::vector<double> counts(bins, 0.0);
  const double bin_width = alpha_max / bins;
  std::size_t n_ref = 0;
  for (const VectorXd& lam : spectra) {
    for (int i = 0; i < n; ++i) {
      const double li = lam(i);
      if (li < E - half_width || li > E + half_width) continue;
      ++n_ref;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double alpha = n * rho_e * (lam(j) - li);
        const double a = std::abs(alpha);
        if (a >= alpha_max) continue;
        counts[static_cast<int>(a / bin_width)] += 1.0;
      }
    }
  }
  if (n_ref == 0) throw EmptyWindow("two_point_estimate: no reference eigenvalue near E");

  TwoPointCurve curve;
  for (int b = 0; b < bins; ++b) {
    const double center = (b + 0.5) * bin_width;
    curve.alpha_centers.push_back(center);
    // folded |alpha| bins collect both signs: 2 * bin_width of rescaled length
    curve.estimate.push_back(counts[b] / (static_cast<double>(n_ref) * 2.0 * bin_width));
    curve.reference.push_back(1.0 - sine_kernel(center) * sine_kernel(center));
  }
  return curve;
}

}  // namespace dysonlab::dbm
