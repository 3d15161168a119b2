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

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dysonlab/density.hpp"

namespace dysonlab::dbm {

using Eigen::VectorXd;

/// Ordered eigenvalue configuration of the interacting SDE
///   d lambda_i = sqrt(2/(beta N)) dB_i
///               + (-lambda_i/2 + (1/N) sum_{j != i} 1/(lambda_i - lambda_j)) dt.
/// The noise prefactor sqrt(2/(beta N)) makes the Gaussian ensemble of class
/// beta the exact stationary law; the restoring -lambda/2 drift keeps the
/// variance fixed.
struct DbmState {
  VectorXd lambdas;  // strictly increasing
  double t = 0.0;
  int beta = 2;  // 1 or 2
};

struct DbmOpts {
  double dt_floor = 1e-12;
  double noise_scale = 1.0;  // 0 disables the noise (test hook)
  // optional per-step observer(state) called after each accepted step
  std::function<void(const DbmState&)> observer;
};

/// Euler-Maruyama integration to t_end with base step dt. A step that breaks
/// the strict ordering is rejected and retried at half the step (fresh noise,
/// variance scaled accordingly); StepFloor is raised when dt falls below the
/// floor instead of distorting the repulsion. Single path is sequential;
/// the noise stream is a counter sequence in (seed, attempt, particle).
DbmState dbm_simulate(const DbmState& initial, double t_end, double dt, std::uint64_t seed,
                      const DbmOpts& opts = {});

/// Rescaled bulk gaps g_i = n rho(lambda_i) (lambda_{i+1} - lambda_i) for
/// lambda_i inside the window.
struct GapSample {
  std::vector<double> gaps;
  std::pair<double, double> window;
};

GapSample normalized_gaps(const VectorXd& lambdas, const DensityCurve& d,
                          std::pair<double, double> window);

/// Two-sample Kolmogorov-Smirnov distance between gap samples (>= 200 gaps
/// each).
double gap_cdf_distance(const GapSample& a, const GapSample& b);

/// S(x) = sin(pi x) / (pi x), S(0) = 1.
double sine_kernel(double x);

/// Rescaled empirical pair correlation around energy E from a batch of
/// spectra, against the determinantal reference 1 - S(alpha)^2 of the
/// complex-hermitian class. Bins cover |alpha| <= 4 folded to [0, 4].
struct TwoPointCurve {
  std::vector<double> alpha_centers;
  std::vector<double> estimate;
  std::vector<double> reference;  // 1 - S(alpha)^2
};

TwoPointCurve two_point_estimate(const std::vector<VectorXd>& spectra, const DensityCurve& d,
                                 double E, int bins);

}  // namespace dysonlab::dbm
