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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "dysonlab/density.hpp"
#include "dysonlab/ensembles.hpp"
#include "dysonlab/half_plane.hpp"
#include "dysonlab/mde.hpp"

namespace dysonlab::locallaw {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Eigendecomposition of one sampled H plus cached resolvent evaluations
/// G(z) = sum_i |u_i><u_i| / (lambda_i - z). A full decomposition is kept
/// because many z share one H and the eigenvectors feed delocalization.
/// The Ward identity sum_j |G_ij|^2 = Im G_ii / eta is checked at every
/// evaluation and the worst defect is tracked.
class ResolventBundle {
 public:
  explicit ResolventBundle(const MatrixXd& h);   // real symmetric
  explicit ResolventBundle(const MatrixXcd& h);  // complex hermitian

  int n() const { return static_cast<int>(evals_.size()); }
  const VectorXd& eigenvalues() const { return evals_; }
  bool is_real() const { return real_vecs_.has_value(); }
  const MatrixXd& real_eigenvectors() const { return *real_vecs_; }
  const MatrixXcd& complex_eigenvectors() const { return *cplx_vecs_; }

  /// Cached resolvent at z (Im z > 0).
  const MatrixXcd& resolvent(HalfPlanePoint z);

  /// H G for the error-matrix cross-check.
  MatrixXcd h_times(const MatrixXcd& g) const;

  double max_ward_defect() const { return max_ward_defect_; }
  double reconstruction_defect() const { return reconstruction_defect_; }

 private:
  void finish_construction();

  VectorXd evals_;
  std::optional<MatrixXd> real_vecs_;
  std::optional<MatrixXcd> cplx_vecs_;
  std::optional<MatrixXd> h_real_;
  std::optional<MatrixXcd> h_cplx_;
  double max_ward_defect_ = 0.0;
  double reconstruction_defect_ = 0.0;
  std::map<std::pair<double, double>, std::unique_ptr<MatrixXcd>> cache_;
  std::mutex mutex_;
};

/// Deterministic reference side of the local laws: a diagonal vector solution
/// or a full matrix solution.
struct Reference {
  const VectorXcd* diag = nullptr;
  const MatrixXcd* full = nullptr;
  static Reference vector(const VectorXcd& m) { return Reference{&m, nullptr}; }
  static Reference matrix(const MatrixXcd& m) { return Reference{nullptr, &m}; }
};

struct ErrorReport {
  double entrywise = 0.0;   // max_ij |G_ij - M_ij|
  double averaged = 0.0;    // |tr T (G - M)| / n
  double isotropic = 0.0;   // |<x, (G - M) y>|
  double d_maxnorm = 0.0;   // max_ij |D_ij|, D = I + (z + S[G]) G
  double d_identity_defect = 0.0;  // max | (HG + S[G]G) - (I + (z+S[G])G) |
  Complex z;
  int n = 0;
};

ErrorReport error_report(ResolventBundle& bundle, HalfPlanePoint z, const Reference& ref,
                         const mde::SelfEnergySpec& model, const MatrixXcd& t,
                         const VectorXcd& x, const VectorXcd& y);

struct ScalingRow {
  int n;
  double eta;
  int seed;
  double entrywise, isotropic, averaged, d_maxnorm;
};

struct SlopeFit {
  double slope;
  double half_width;  // 2 * standard error
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  // per (n, eta): medians and 90th percentiles keyed in row order of the axis
  std::vector<std::tuple<int, double, ErrorReport, ErrorReport>> axis_stats;  // median, p90
  SlopeFit entrywise, isotropic, averaged, d_maxnorm;  // vs log(n * eta)
  double max_ward_defect = 0.0;
  double max_d_identity_defect = 0.0;
};

/// Monte-Carlo scaling study of the local-law error rates at fixed bulk
/// energy E: for each n in n_list, `seeds` independent samples, errors
/// measured at every eta in eta_list, then log-log slopes of the medians
/// against n*eta. Requires rho(E) >= 0.05 and n*eta >= 4.
ScalingStudy scaling_study(const ensembles::EnsembleSpec& ensemble,
                           const std::vector<int>& n_list, const std::vector<double>& eta_list,
                           int seeds, double E, int threads = 1);

/// max over eigenvectors with eigenvalue in the window of sqrt(n)*||u||_inf.
double delocalization_stat(const ResolventBundle& bundle, std::pair<double, double> window);

struct RigidityReport {
  double max_dev = 0.0;
  std::vector<std::pair<int, double>> per_index;  // (i, |lambda_i - gamma_i|), bulk only
};

/// Bulk eigenvalue rigidity against the quantiles of d; indices with
/// rho(gamma_i) < 0.05 are excluded.
RigidityReport rigidity_report(const VectorXd& lambdas, const DensityCurve& d);

/// Smoothed indicator of [tau1, tau2] with C^2 quintic ramps of width eta0.
struct SmoothedIndicator {
  double tau1, tau2, eta0;
  double f(double x) const;
  double df(double x) const;
  double ddf(double x) const;
};

/// Evaluate int f dnu from the Stieltjes transform of nu alone, through the
/// Helffer-Sjostrand contour integral with the fixed cosine-taper cutoff
/// (1 on [-1,1], supported in [-2,2]). err_est, when given, receives a
/// two-resolution quadrature error estimate; QuadratureFailure if it exceeds
/// 1e-3.
double hs_count(const std::function<Complex(Complex)>& m_nu, const SmoothedIndicator& f_spec,
                double* err_est = nullptr);

}  // namespace dysonlab::locallaw
