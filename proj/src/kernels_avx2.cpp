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

#include "dysonlab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace dysonlab::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

void matvec_avx2(const double* a, const double* x, double* y, int n) {
  const int n4 = n & ~3;
  for (int i = 0; i < n; ++i) {
    const double* row = a + static_cast<std::size_t>(i) * n;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j + 4), _mm256_loadu_pd(x + j + 4), acc1);
    }
    for (; j < n4; j += 4) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void pairwise_inv_sum_avx2(const double* lam, double* out, int n) {
  const __m256d one = _mm256_set1_pd(1.0);
  for (int i = 0; i < n; ++i) {
    const __m256d li = _mm256_set1_pd(lam[i]);
    __m256d acc = _mm256_setzero_pd();
    double tail = 0.0;
    // [0, i) then (i, n): the diagonal term is skipped, not masked.
    int j = 0;
    for (; j + 4 <= i; j += 4) {
      acc = _mm256_add_pd(acc, _mm256_div_pd(one, _mm256_sub_pd(li, _mm256_loadu_pd(lam + j))));
    }
    for (; j < i; ++j) tail += 1.0 / (lam[i] - lam[j]);
    j = i + 1;
    for (; j + 4 <= n; j += 4) {
      acc = _mm256_add_pd(acc, _mm256_div_pd(one, _mm256_sub_pd(li, _mm256_loadu_pd(lam + j))));
    }
    for (; j < n; ++j) tail += 1.0 / (lam[i] - lam[j]);
    out[i] = hsum(acc) + tail;
  }
}

void abs2_row_sums_avx2(const std::complex<double>* g, double* out, int n) {
  const double* p = reinterpret_cast<const double*>(g);
  for (int i = 0; i < n; ++i) {
    const double* row = p + 2 * static_cast<std::size_t>(i) * n;
    __m256d acc = _mm256_setzero_pd();
    int k = 0;
    const int len = 2 * n;
    for (; k + 4 <= len; k += 4) {
      const __m256d v = _mm256_loadu_pd(row + k);
      acc = _mm256_fmadd_pd(v, v, acc);
    }
    double s = hsum(acc);
    for (; k < len; ++k) s += row[k] * row[k];
    out[i] = s;
  }
}

double max_abs_diff_avx2(const std::complex<double>* a, const std::complex<double>* b,
                         std::size_t count) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  const std::size_t len = 2 * count;
  __m256d best = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k));
    const __m256d sq = _mm256_mul_pd(d, d);
    // (re^2+im^2, ., re^2+im^2, .) for the two complex lanes
    best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
  }
  double m = hmax(best);
  for (; k + 2 <= len; k += 2) {
    const double dre = pa[k] - pb[k];
    const double dim = pa[k + 1] - pb[k + 1];
    const double d2 = dre * dre + dim * dim;
    if (d2 > m) m = d2;
  }
  return std::sqrt(m);
}

}  // namespace dysonlab::kernels::detail

#endif  // x86_64
