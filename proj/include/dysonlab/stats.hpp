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

#include <vector>

namespace dysonlab::stats {

// Two-sample Kolmogorov-Smirnov statistic: sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Linear-interpolation percentile of an unsorted sample, p in [0, 1].
double percentile(std::vector<double> v, double p);

double median(std::vector<double> v);

// Trapezoid rule over an increasing grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

// Nodes/weights for Gauss-Legendre quadrature on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace dysonlab::stats
