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

namespace dysonlab::linalg {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Hermitian eigendecompositions routed through LAPACK (syevd/heevd). The BLAS
// is pinned to one thread so results do not depend on the caller's pool size.
struct EighReal {
  VectorXd evals;  // ascending
  MatrixXd vecs;   // columns; empty if !want_vectors
};
struct EighComplex {
  VectorXd evals;
  MatrixXcd vecs;
};

EighReal eigh(const MatrixXd& a, bool want_vectors = true);
EighComplex eigh(const MatrixXcd& a, bool want_vectors = true);

// C = A * B through dgemm/zgemm; noticeably faster than the expression
// templates for the n ~ 1000 resolvent work.
MatrixXd gemm(const MatrixXd& a, const MatrixXd& b, bool transpose_a = false,
              bool transpose_b = false);
MatrixXcd gemm(const MatrixXcd& a, const MatrixXcd& b, bool adjoint_a = false,
               bool adjoint_b = false);

// Largest singular value (dense, exact via svd for small n, via eigh of A*A
// otherwise).
double operator_norm_2(const MatrixXcd& a);

// Smallest singular value via eigh of A* A.
double smallest_singular_value(const MatrixXcd& a);

// x solving a x = b through zgesv (a is overwritten-free; a copy is taken).
VectorXcd solve_lu(const MatrixXcd& a, const VectorXcd& b);

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);

}  // namespace dysonlab::linalg
