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

#include "dysonlab/linalg.hpp"

#include <lapacke.h>

#include <mutex>
#include <stdexcept>
#include <vector>

#include "dysonlab/errors.hpp"

extern "C" void openblas_set_num_threads(int);
extern "C" void cblas_dgemm(int order, int transa, int transb, int m, int n, int k, double alpha,
                            const double* a, int lda, const double* b, int ldb, double beta,
                            double* c, int ldc);
extern "C" void cblas_zgemm(int order, int transa, int transb, int m, int n, int k,
                            const void* alpha, const void* a, int lda, const void* b, int ldb,
                            const void* beta, void* c, int ldc);

namespace dysonlab::linalg {

namespace {

// CBLAS enums, spelled out to avoid a header clash with lapacke's complex
// typedefs.
constexpr int kColMajor = 102;
constexpr int kNoTrans = 111;
constexpr int kTrans = 112;
constexpr int kConjTrans = 113;

void pin_blas_threads() {
  static std::once_flag flag;
  std::call_once(flag, [] { openblas_set_num_threads(1); });
}

}  // namespace

EighReal eigh(const MatrixXd& a, bool want_vectors) {
  pin_blas_threads();
  if (a.rows() != a.cols()) throw InvalidInput("eigh: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EighReal out;
  out.evals.resize(n);
  MatrixXd work = a;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                                         work.data(), n, out.evals.data());
  if (info != 0) throw std::runtime_error("dsyevd failed, info=" + std::to_string(info));
  if (want_vectors) out.vecs = std::move(work);
  return out;
}

EighComplex eigh(const MatrixXcd& a, bool want_vectors) {
  pin_blas_threads();
  if (a.rows() != a.cols()) throw InvalidInput("eigh: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  EighComplex out;
  out.evals.resize(n);
  MatrixXcd work = a;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                     reinterpret_cast<lapack_complex_double*>(work.data()), n, out.evals.data());
  if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
  if (want_vectors) out.vecs = std::move(work);
  return out;
}

MatrixXd gemm(const MatrixXd& a, const MatrixXd& b, bool transpose_a, bool transpose_b) {
  pin_blas_threads();
  const int m = static_cast<int>(transpose_a ? a.cols() : a.rows());
  const int k = static_cast<int>(transpose_a ? a.rows() : a.cols());
  const int kb = static_cast<int>(transpose_b ? b.cols() : b.rows());
  const int n = static_cast<int>(transpose_b ? b.rows() : b.cols());
  if (k != kb) throw InvalidInput("gemm: inner dimensions do not agree");
  MatrixXd c(m, n);
  cblas_dgemm(kColMajor, transpose_a ? kTrans : kNoTrans, transpose_b ? kTrans : kNoTrans, m, n, k,
              1.0, a.data(), static_cast<int>(a.rows()), b.data(), static_cast<int>(b.rows()), 0.0,
              c.data(), m);
  return c;
}

MatrixXcd gemm(const MatrixXcd& a, const MatrixXcd& b, bool adjoint_a, bool adjoint_b) {
  pin_blas_threads();
  const int m = static_cast<int>(adjoint_a ? a.cols() : a.rows());
  const int k = static_cast<int>(adjoint_a ? a.rows() : a.cols());
  const int kb = static_cast<int>(adjoint_b ? b.cols() : b.rows());
  const int n = static_cast<int>(adjoint_b ? b.rows() : b.cols());
  if (k != kb) throw InvalidInput("gemm: inner dimensions do not agree");
  const std::complex<double> one(1.0, 0.0), zero(0.0, 0.0);
  MatrixXcd c(m, n);
  cblas_zgemm(kColMajor, adjoint_a ? kConjTrans : kNoTrans, adjoint_b ? kConjTrans : kNoTrans, m, n,
              k, &one, a.data(), static_cast<int>(a.rows()), b.data(),
              static_cast<int>(b.rows()), &zero, c.data(), m);
  return c;
}

double operator_norm_2(const MatrixXcd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (a.rows() <= 256 && a.cols() <= 256) {
    return Eigen::JacobiSVD<MatrixXcd>(a).singularValues()(0);
  }
  const MatrixXcd gram = gemm(a, a, /*adjoint_a=*/true, /*adjoint_b=*/false);
  const auto eg = eigh(gram, /*want_vectors=*/false);
  return std::sqrt(std::max(0.0, eg.evals(eg.evals.size() - 1)));
}

double smallest_singular_value(const MatrixXcd& a) {
  if (a.rows() != a.cols()) throw InvalidInput("smallest_singular_value: square input expected");
  const MatrixXcd gram = a.adjoint() * a;
  const auto eg = eigh(gram, /*want_vectors=*/false);
  return std::sqrt(std::max(0.0, eg.evals(0)));
}

VectorXcd solve_lu(const MatrixXcd& a, const VectorXcd& b) {
  pin_blas_threads();
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw InvalidInput("solve_lu: dimension mismatch");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  MatrixXcd lu = a;
  VectorXcd x = b;
  std::vector<lapack_int> ipiv(n);
  const lapack_int info =
      LAPACKE_zgesv(LAPACK_COL_MAJOR, n, 1, reinterpret_cast<lapack_complex_double*>(lu.data()),
                    n, ipiv.data(), reinterpret_cast<lapack_complex_double*>(x.data()), n);
  if (info != 0) throw std::runtime_error("zgesv failed, info=" + std::to_string(info));
  return x;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace dysonlab::linalg
