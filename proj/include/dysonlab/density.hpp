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
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace dysonlab {

/// Sampled self-consistent density of states on an increasing grid.
/// rho is the averaged density; components, when present, holds the
/// per-index generating densities nu_i (rows = indices, cols = grid).
/// Points where the solver failed are flagged invalid instead of aborting
/// the sweep.
struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> rho;
  Eigen::MatrixXd components;  // 0x0 when not requested
  double eta_used = 0.0;
  std::vector<std::uint8_t> valid;

  bool has_components() const { return components.size() > 0; }
  bool all_valid() const;
  /// Linear interpolation of rho; zero outside the grid.
  double rho_at(double tau) const;
  /// Trapezoid mass over the valid grid.
  double total_mass() const;
};

struct SupportSet {
  std::vector<std::pair<double, double>> intervals;  // disjoint, sorted
};

/// Maximal grid intervals where rho exceeds the threshold. Dropouts narrower
/// than two grid spacings are bridged, so a reported gap is always wider than
/// the resolution floor.
SupportSet support_set(const DensityCurve& d, double threshold);

/// N-quantiles gamma_i, i = 1..count, solving cumulative(gamma_i) = i/count by
/// monotone (piecewise-linear) inversion of the trapezoid cumulative integral.
/// Quantiles falling beyond the reachable mass are clamped to the grid ends.
std::vector<double> quantiles(const DensityCurve& d, int count);

/// Index of the count-quantile closest to E: ceil(count * cumulative(E)).
int index_of(const DensityCurve& d, double E, int count);

/// Numerically re-transform the curve back to the upper half plane,
/// int rho(tau) / (tau - z) dtau by trapezoid quadrature.
std::complex<double> cauchy_transform(const DensityCurve& d, std::complex<double> z);

}  // namespace dysonlab
