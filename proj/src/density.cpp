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

#include "dysonlab/density.hpp"

#include <algorithm>
#include <cmath>

#include "dysonlab/errors.hpp"

namespace dysonlab {

namespace {

void check_curve(const DensityCurve& d) {
  if (d.grid.size() != d.rho.size() || d.grid.size() < 2)
    throw InvalidInput("DensityCurve: grid/rho size mismatch");
  for (std::size_t k = 1; k < d.grid.size(); ++k)
    if (!(d.grid[k] > d.grid[k - 1])) throw InvalidInput("DensityCurve: grid must increase");
}

// Cumulative trapezoid integral at each grid node, treating invalid points as
// linearly bridged by their neighbors (they carry NaN in rho).
std::vector<double> cumulative(const DensityCurve& d) {
  std::vector<double> cum(d.grid.size(), 0.0);
  double prev_rho = std::isfinite(d.rho[0]) ? d.rho[0] : 0.0;
  for (std::size_t k = 1; k < d.grid.size(); ++k) {
    double r = d.rho[k];
    if (!std::isfinite(r)) r = prev_rho;
    cum[k] = cum[k - 1] + 0.5 * (r + prev_rho) * (d.grid[k] - d.grid[k - 1]);
    prev_rho = r;
  }
  return cum;
}

}  // namespace

bool DensityCurve::all_valid() const {
  if (valid.empty()) return true;
  return std::all_of(valid.begin(), valid.end(), [](std::uint8_t v) { return v != 0; });
}

double DensityCurve::rho_at(double tau) const {
  if (grid.empty()) return 0.0;
  if (tau <= grid.front() || tau >= grid.back()) {
    if (tau == grid.front()) return rho.front();
    if (tau == grid.back()) return rho.back();
    return 0.0;
  }
  const auto it = std::upper_bound(grid.begin(), grid.end(), tau);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin());
  const double w = (tau - grid[k - 1]) / (grid[k] - grid[k - 1]);
  return (1.0 - w) * rho[k - 1] + w * rho[k];
}

double DensityCurve::total_mass() const {
  const auto cum = cumulative(*this);
  return cum.back();
}

SupportSet support_set(const DensityCurve& d, double threshold) {
  check_curve(d);
  if (!(threshold > 0.0)) throw InvalidInput("support_set: threshold must be > 0");
  const std::size_t n = d.grid.size();
  std::vector<std::uint8_t> above(n, 0);
  for (std::size_t k = 0; k < n; ++k)
    above[k] = (std::isfinite(d.rho[k]) && d.rho[k] > threshold) ? 1 : 0;
  // bridge single-point dropouts
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (!above[k] && above[k - 1] && above[k + 1]) above[k] = 1;

  SupportSet out;
  std::size_t k = 0;
  while (k < n) {
    if (!above[k]) {
      ++k;
      continue;
    }
    std::size_t start = k;
    while (k < n && above[k]) ++k;
    out.intervals.emplace_back(d.grid[start], d.grid[k - 1]);
  }
  // gaps narrower than 2 grid spacings are resolution artifacts; merge them
  const double spacing = (d.grid.back() - d.grid.front()) / static_cast<double>(n - 1);
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : out.intervals) {
    if (!merged.empty() && iv.first - merged.back().second < 2.0 * spacing)
      merged.back().second = iv.second;
    else
      merged.push_back(iv);
  }
  out.intervals = std::move(merged);
  return out;
}

std::vector<double> quantiles(const DensityCurve& d, int count) {
  check_curve(d);
  if (count <= 0) throw InvalidInput("quantiles: count must be positive");
  const auto cum = cumulative(d);
  if (cum.back() < 0.99) throw MassDeficit("quantiles: total mass " + std::to_string(cum.back()));
  std::vector<double> gamma(count);
  std::size_t k = 1;
  for (int i = 1; i <= count; ++i) {
    const double target = static_cast<double>(i) / count;
    if (target >= cum.back()) {
      gamma[i - 1] = d.grid.back();
      continue;
    }
    while (k + 1 < cum.size() && cum[k] < target) ++k;
    // invert the linear piece between nodes k-1 and k
    const double c0 = cum[k - 1], c1 = cum[k];
    const double w = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.0;
    gamma[i - 1] = d.grid[k - 1] + w * (d.grid[k] - d.grid[k - 1]);
    if (k > 1 && cum[k - 1] > target) k = 1;  // targets are increasing; reset only defensively
  }
  return gamma;
}

int index_of(const DensityCurve& d, double E, int count) {
  check_curve(d);
  if (count <= 0) throw InvalidInput("index_of: count must be positive");
  const auto cum = cumulative(d);
  if (cum.back() < 0.99) throw MassDeficit("index_of: total mass " + std::to_string(cum.back()));
  double c;
  if (E <= d.grid.front())
    c = 0.0;
  else if (E >= d.grid.back())
    c = cum.back();
  else {
    const auto it = std::upper_bound(d.grid.begin(), d.grid.end(), E);
    const std::size_t k = static_cast<std::size_t>(it - d.grid.begin());
    const double w = (E - d.grid[k - 1]) / (d.grid[k] - d.grid[k - 1]);
    c = cum[k - 1] + w * (cum[k] - cum[k - 1]);
  }
  const int idx = static_cast<int>(std::ceil(count * c));
  return std::clamp(idx, 1, count);
}

std::complex<double> cauchy_transform(const DensityCurve& d, std::complex<double> z) {
  check_curve(d);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t k = 1; k < d.grid.size(); ++k) {
    const double r0 = std::isfinite(d.rho[k - 1]) ? d.rho[k - 1] : 0.0;
    const double r1 = std::isfinite(d.rho[k]) ? d.rho[k] : 0.0;
    const std::complex<double> f0 = r0 / (d.grid[k - 1] - z);
    const std::complex<double> f1 = r1 / (d.grid[k] - z);
    acc += 0.5 * (f0 + f1) * (d.grid[k] - d.grid[k - 1]);
  }
  return acc;
}

}  // namespace dysonlab
