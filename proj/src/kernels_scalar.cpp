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

#include <cmath>

#include "dysonlab/kernels.hpp"

namespace dysonlab::kernels::detail {

void matvec_scalar(const double* a, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) {
    const double* row = a + static_cast<std::size_t>(i) * n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void pairwise_inv_sum_scalar(const double* lam, double* out, int n) {
  for (int i = 0; i < n; ++i) {
    const double li = lam[i];
    double acc = 0.0;
    for (int j = 0; j < i; ++j) acc += 1.0 / (li - lam[j]);
    for (int j = i + 1; j < n; ++j) acc += 1.0 / (li - lam[j]);
    out[i] = acc;
  }
}

void abs2_row_sums_scalar(const std::complex<double>* g, double* out, int n) {
  const double* p = reinterpret_cast<const double*>(g);
  for (int i = 0; i < n; ++i) {
    const double* row = p + 2 * static_cast<std::size_t>(i) * n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double re = row[2 * j];
      const double im = row[2 * j + 1];
      acc += re * re + im * im;
    }
    out[i] = acc;
  }
}

double max_abs_diff_scalar(const std::complex<double>* a, const std::complex<double>* b,
                           std::size_t count) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double best = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double dre = pa[2 * k] - pb[2 * k];
    const double dim = pa[2 * k + 1] - pb[2 * k + 1];
    const double d2 = dre * dre + dim * dim;
    if (d2 > best) best = d2;
  }
  return std::sqrt(best);
}

}  // namespace dysonlab::kernels::detail
