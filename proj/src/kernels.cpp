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

#include <cstdlib>
#include <cstring>

namespace dysonlab::kernels {

namespace {

struct Backend {
  void (*matvec)(const double*, const double*, double*, int);
  void (*pairwise_inv_sum)(const double*, double*, int);
  void (*abs2_row_sums)(const std::complex<double>*, double*, int);
  double (*max_abs_diff)(const std::complex<double>*, const std::complex<double>*, std::size_t);
  const char* name;
};

constexpr Backend kScalar = {
    detail::matvec_scalar,
    detail::pairwise_inv_sum_scalar,
    detail::abs2_row_sums_scalar,
    detail::max_abs_diff_scalar,
    "scalar",
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Backend kAvx2 = {
    detail::matvec_avx2,
    detail::pairwise_inv_sum_avx2,
    detail::abs2_row_sums_avx2,
    detail::max_abs_diff_avx2,
    "avx2",
};
#endif

Backend select() {
  const char* env = std::getenv("DYSONLAB_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return kScalar;
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return kAvx2;
#endif
  return kScalar;
}

Backend g_backend = select();

}  // namespace

void matvec(const double* a, const double* x, double* y, int n) { g_backend.matvec(a, x, y, n); }

void pairwise_inv_sum(const double* lam, double* out, int n) {
  g_backend.pairwise_inv_sum(lam, out, n);
}

void abs2_row_sums(const std::complex<double>* g, double* out, int n) {
  g_backend.abs2_row_sums(g, out, n);
}

double max_abs_diff(const std::complex<double>* a, const std::complex<double>* b,
                    std::size_t count) {
  return g_backend.max_abs_diff(a, b, count);
}

const char* backend() { return g_backend.name; }

void force_scalar(bool on) { g_backend = on ? kScalar : select(); }

}  // namespace dysonlab::kernels
