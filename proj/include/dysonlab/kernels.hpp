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

#include <complex>
#include <cstddef>

namespace dysonlab::kernels {

// Data-parallel inner loops shared by the solvers and the Monte-Carlo
// harness. Every kernel has a scalar reference implementation and an AVX2
// variant; dispatch happens once at startup based on cpuid. The two variants
// are equivalence-tested against each other (FMA reassociation means results
// agree to rounding, not bit-for-bit).

// y = A x with A dense row-major n-by-n. A symmetric caller may pass either
// storage order.
void matvec(const double* a, const double* x, double* y, int n);

// out_i = sum_{j != i} 1 / (lam_i - lam_j). Quadratic pairwise sum used by
// the eigenvalue-repulsion drift.
void pairwise_inv_sum(const double* lam, double* out, int n);

// out_i = sum_j |G_ij|^2 for a row-major complex n-by-n matrix.
void abs2_row_sums(const std::complex<double>* g, double* out, int n);

// max_k |a_k - b_k| over two flat complex arrays.
double max_abs_diff(const std::complex<double>* a, const std::complex<double>* b,
                    std::size_t count);

// Name of the active backend ("avx2" or "scalar").
const char* backend();

// Test hook: force the scalar reference path (true) or restore dispatch
// (false). Not thread safe; call before spawning workers.
void force_scalar(bool on);

namespace detail {
void matvec_scalar(const double* a, const double* x, double* y, int n);
void pairwise_inv_sum_scalar(const double* lam, double* out, int n);
void abs2_row_sums_scalar(const std::complex<double>* g, double* out, int n);
double max_abs_diff_scalar(const std::complex<double>* a, const std::complex<double>* b,
                           std::size_t count);

#if defined(__x86_64__) || defined(_M_X64)
void matvec_avx2(const double* a, const double* x, double* y, int n);
void pairwise_inv_sum_avx2(const double* lam, double* out, int n);
void abs2_row_sums_avx2(const std::complex<double>* g, double* out, int n);
double max_abs_diff_avx2(const std::complex<double>* a, const std::complex<double>* b,
                         std::size_t count);
#endif
}  // namespace detail

}  // namespace dysonlab::kernels
