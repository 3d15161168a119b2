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
#include <functional>
#include <vector>

#include "dysonlab/density.hpp"
#include "dysonlab/half_plane.hpp"
#include "dysonlab/variance_matrix.hpp"

namespace dysonlab::vde {

using Complex = std::complex<double>;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Stieltjes transform of the semicircle density, (-z + sqrt(z^2 - 4)) / 2.
/// The root is realized as sqrt(z-2) * sqrt(z+2) with principal-branch
/// factors, which gives sqrt(z^2-4) ~ z at infinity on all of the upper half
/// plane and hence Im msc > 0.
Complex msc(HalfPlanePoint z);

/// 2k-th moment of the semicircle density: the k-th Catalan number,
/// binom(2k,k)/(k+1). Exact for k <= 30; larger k overflows 64-bit.
std::int64_t catalan_moment(int k);

struct SolverOpts {
  double tol = 1e-10;          // sup-norm residual target
  int max_iter = 10000;        // per continuation level
  double eta_start = 1.0;      // continuation entry scale
  double eta_factor = 0.7;     // geometric descent of the continuation
  double newton_threshold = 1e-3;  // hand over from plain iteration to Newton
};

/// Converged solution of -1/m = z + S m with Im m > 0 componentwise.
struct SolutionVector {
  HalfPlanePoint z;
  VectorXcd m;
  double residual;  // max_i |1 + (z + (Sm)_i) m_i|
};

/// Solve the self-consistent equation at z by eta-continuation: plain
/// fixed-point iteration of u -> -1/(z + S u) at Im z' = eta_start, then the
/// level eta is decreased geometrically reusing the previous solution as warm
/// start; within a level a damped Newton step takes over once the residual is
/// below newton_threshold. Throws NonConvergence with the last residual when
/// an iteration budget is exhausted.
SolutionVector solve_vde(const VarianceMatrix& s, HalfPlanePoint z, const SolverOpts& opts = {});

double vde_residual(const VarianceMatrix& s, HalfPlanePoint z, const VectorXcd& m);

/// Density sweep rho(tau) = Im<m(tau + i eta)>/pi. Grid points where the
/// solver fails are marked invalid (NaN rho) instead of aborting. Parallel
/// over grid points; each point runs its own continuation chain, so results
/// do not depend on the thread budget.
DensityCurve sc_density(const VarianceMatrix& s, const std::vector<double>& grid, double eta,
                        bool with_components = false, int threads = 1,
                        const SolverOpts& opts = {});

/// Saturated self-energy matrix F_ij = |m_i| s_ij |m_j| with its
/// Perron-Frobenius data.
struct SaturatedF {
  Eigen::MatrixXd entries;
  double norm;         // ||F||_2 = largest eigenvalue
  VectorXd pf_vector;  // positive, ||f||_2 = 1
  double gap;          // ||F||_2 - second largest |eigenvalue|
};

SaturatedF saturated_f(const VarianceMatrix& s, const VectorXcd& m);

/// Defect of the norm identity ||F||_2 = 1 - eta <f,|m|> / <f, Im m/|m|>.
/// Both scalar products use the same (plain Euclidean) convention, so the
/// normalization cancels.
double f_norm_identity_defect(const SaturatedF& f, const VectorXcd& m, HalfPlanePoint z);

enum class NormKind { l2, sup };

/// Norm of the inverse stability operator (1 - m^2 S)^{-1}: reciprocal
/// smallest singular value for l2, induced max-row-sum norm of the explicit
/// inverse for sup.
double stability_inverse_norm(const VarianceMatrix& s, const VectorXcd& m, NormKind kind);

enum class Side { left, right, both };

struct EdgeFit {
  enum class Kind { edge_sqrt, cusp_cbrt, unclassified };
  double slope = 0.0;
  Kind kind = Kind::unclassified;
  std::vector<std::pair<double, double>> ladder;  // (omega, rho) pairs used
  double eta_floor = 0.0;                         // smallest regularization used
};

/// Least-squares slope of log rho against log |tau - tau0| over a geometric
/// ladder of offsets omega in [1e-4, 1e-2]. rho_at(tau, eta) must evaluate
/// the density at regularization eta; each ladder point uses eta = omega/10
/// so the finite-eta smoothing stays subordinate to the offset.
EdgeFit edge_exponent(const std::function<double(double, double)>& rho_at, double tau0, Side side);

}  // namespace dysonlab::vde
