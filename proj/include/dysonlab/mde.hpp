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
#include <functional>
#include <optional>
#include <vector>

#include "dysonlab/density.hpp"
#include "dysonlab/half_plane.hpp"
#include "dysonlab/variance_matrix.hpp"
#include "json.hpp"

namespace dysonlab::mde {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

/// Second-moment data of the ensemble as the superoperator S[R] = E[H R H].
/// Three representations:
///   isotropic: S[R] = <R> I
///   diagonal:  S[R] = diag(S . diag(R)) with an embedded variance matrix
///   full:      4-tensor kappa(i,j,k,l) = E[h_ij h_kl], contracted over the
///              middle indices; capped at n <= 64 (n^4 storage)
struct SelfEnergySpec {
  enum class Kind { isotropic, diagonal, full };

  int n = 0;
  Kind kind = Kind::isotropic;
  std::optional<VarianceMatrix> variance_matrix;  // diagonal kind
  std::vector<double> kappa;                      // full kind, row-major (i,j,k,l)
  std::optional<std::pair<double, double>> flatness_bounds;

  static SelfEnergySpec isotropic(int n);
  static SelfEnergySpec diagonal(VarianceMatrix s);
  static SelfEnergySpec full(int n, std::vector<double> kappa);

  static SelfEnergySpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double kappa_at(int i, int j, int k, int l) const {
    return kappa[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }
};

MatrixXcd apply_self_energy(const SelfEnergySpec& spec, const MatrixXcd& r);

/// n^2 x n^2 matrix of S in the column-major vec basis.
MatrixXcd materialize_self_energy(const SelfEnergySpec& spec);

struct MdeOpts {
  double tol = 1e-10;   // operator-norm residual target
  int max_iter = 10000;
  double eta_start = 1.0;
  double eta_factor = 0.7;
};

struct SolutionMatrix {
  HalfPlanePoint z;
  MatrixXcd M;
  double residual;  // || I + (z - A + S[M]) M ||_2
};

/// Solve I + (z - A + S[M]) M = 0 with Im M > 0 by damped fixed-point
/// iteration M <- (1-alpha) M - alpha (z - A + S[M])^{-1} under the same
/// eta-continuation as the vector solver. The step size halves when the
/// residual grows or the iterate leaves the Im > 0 cone; LosesPositivity is
/// raised only if the step floor is reached on a positivity failure.
SolutionMatrix solve_mde(const SelfEnergySpec& spec, const MatrixXcd& a_source, HalfPlanePoint z,
                         const MdeOpts& opts = {});

DensityCurve mde_density(const SelfEnergySpec& spec, const MatrixXcd& a_source,
                         const std::vector<double>& grid, double eta, int threads = 1,
                         const MdeOpts& opts = {});

/// Symmetric polar decomposition M = Q Y Q* with B = Im M, Q = sqrt(B) W,
/// W = [1 + (B^{-1/2} Re M B^{-1/2})^2]^{1/4} and unitary Y.
struct PolarParts {
  MatrixXcd B;       // Im M
  MatrixXcd A_part;  // Re M
  MatrixXcd W;
  MatrixXcd Y;
  MatrixXcd Q;
};

PolarParts polar_decompose(const SolutionMatrix& sol);

/// Linear map on n x n matrices.
struct SuperOperator {
  int n = 0;
  std::function<MatrixXcd(const MatrixXcd&)> apply;
  std::optional<MatrixXcd> materialized;  // n^2 x n^2, set when n <= 64
};

/// Saturated superoperator F[X] = Q* S[Q X Q*] Q; self-adjoint w.r.t. the
/// Hilbert-Schmidt inner product and positivity preserving.
SuperOperator saturated_superop(const SelfEnergySpec& spec, const PolarParts& parts);

struct SuperopSpectrum {
  double norm;           // largest |eigenvalue| on the n^2 space
  double gap;            // norm - second largest |eigenvalue|
  MatrixXcd eigenmatrix; // ||.||_HS = 1, PSD for positivity-preserving ops
};

SuperopSpectrum superop_norm_and_gap(const SuperOperator& op);

struct StabilityDiagnostics {
  double direct = 0.0;        // 1 / sigma_min(1 - C_M S)
  double factored_bound = 0.0;  // ||K_Q|| * ||(1 - C_Y F)^{-1}|| * ||K_Q^{-1}||
};

/// Reciprocal smallest singular value of the materialized stability
/// superoperator 1 - C_M S, plus the factored bound through the saturated
/// superoperator for diagnostics.
double stability_inverse_norm_mde(const SelfEnergySpec& spec, const SolutionMatrix& sol,
                                  StabilityDiagnostics* diag = nullptr);

}  // namespace dysonlab::mde
