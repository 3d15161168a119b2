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

#include "dysonlab/vde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dysonlab/errors.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/linalg.hpp"
#include "dysonlab/parallel.hpp"
#include "dysonlab/stats.hpp"

namespace dysonlab::vde {

namespace {

// S u for complex u via two real matvecs through the kernel core.
struct MatvecWorkspace {
  VectorXd xr, xi, yr, yi;
  void resize(int n) {
    xr.resize(n);
    xi.resize(n);
    yr.resize(n);
    yi.resize(n);
  }
};

void apply_s(const Eigen::MatrixXd& s, const VectorXcd& u, VectorXcd& out,
             MatvecWorkspace& ws) {
  const int n = static_cast<int>(u.size());
  ws.resize(n);
  for (int i = 0; i < n; ++i) {
    ws.xr(i) = u(i).real();
    ws.xi(i) = u(i).imag();
  }
  kernels::matvec(s.data(), ws.xr.data(), ws.yr.data(), n);
  kernels::matvec(s.data(), ws.xi.data(), ws.yi.data(), n);
  out.resize(n);
  for (int i = 0; i < n; ++i) out(i) = Complex(ws.yr(i), ws.yi(i));
}

double residual_of(const VectorXcd& m, const VectorXcd& sm, Complex z) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    r = std::max(r, std::abs(1.0 + (z + sm(i)) * m(i)));
  return r;
}

bool all_upper(const VectorXcd& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (!(m(i).imag() > 0.0) || !std::isfinite(m(i).real()) || !std::isfinite(m(i).imag()))
      return false;
  return true;
}

// One damped Newton step on F(m) = 1 + (z + Sm) m. The Jacobian is
// diag(z + Sm) + diag(m) S.
bool newton_step(const Eigen::MatrixXd& s, Complex z, VectorXcd& m, VectorXcd& sm,
                 MatvecWorkspace& ws, double& res) {
  const int n = static_cast<int>(m.size());
  Eigen::MatrixXcd jac = s.cast<Complex>();
  for (int i = 0; i < n; ++i) jac.row(i) *= m(i);
  for (int i = 0; i < n; ++i) jac(i, i) += z + sm(i);
  VectorXcd f(n);
  for (int i = 0; i < n; ++i) f(i) = -(1.0 + (z + sm(i)) * m(i));
  const VectorXcd delta = linalg::solve_lu(jac, f);
  double alpha = 1.0;
  for (int back = 0; back < 40; ++back) {
    VectorXcd trial = m + alpha * delta;
    if (all_upper(trial)) {
      VectorXcd sm_trial;
      apply_s(s, trial, sm_trial, ws);
      const double r_trial = residual_of(trial, sm_trial, z);
      if (r_trial < res) {
        m = std::move(trial);
        sm = std::move(sm_trial);
        res = r_trial;
        return true;
      }
    }
    alpha *= 0.5;
  }
  return false;
}

// Solve at a fixed spectral parameter starting from the warm start m.
void solve_at(const Eigen::MatrixXd& s, Complex z, VectorXcd& m, double tol,
              const SolverOpts& opts, MatvecWorkspace& ws) {
  VectorXcd sm;
  apply_s(s, m, sm, ws);
  double res = residual_of(m, sm, z);
  double prev_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    if (res <= tol) return;
    // Newton once the plain step is below the threshold, or earlier when the
    // contraction has stalled (small eta); damped steps only ever accept an
    // improved residual, so the fixed-point basin is never left.
    const bool stalled = res < 0.5 && res > 0.995 * prev_res;
    if (res < opts.newton_threshold || stalled) {
      if (newton_step(s, z, m, sm, ws, res)) {
        prev_res = std::numeric_limits<double>::infinity();
        continue;
      }
    }
    prev_res = res;
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = -1.0 / (z + sm(i));
    apply_s(s, m, sm, ws);
    res = residual_of(m, sm, z);
  }
  if (res > tol) throw NonConvergence("solve_vde: iteration budget exhausted", res);
}

VectorXcd solve_with_continuation(const Eigen::MatrixXd& s, HalfPlanePoint z,
                                  const SolverOpts& opts) {
  const int n = static_cast<int>(s.rows());
  const double eta_target = z.im();
  // Continuation ladder from eta_start down to the target; geometric steps.
  std::vector<double> etas;
  for (double eta = std::max(opts.eta_start, eta_target); eta > eta_target;
       eta *= opts.eta_factor)
    etas.push_back(eta);
  etas.push_back(eta_target);

  VectorXcd m = VectorXcd::Constant(n, -1.0 / Complex(z.re(), etas.front()));
  MatvecWorkspace ws;
  // Intermediate levels only feed the warm start; full tolerance is enforced
  // at the target parameter alone.
  const double warm_tol = std::max(opts.tol, 1e-6);
  for (std::size_t k = 0; k + 1 < etas.size(); ++k)
    solve_at(s, Complex(z.re(), etas[k]), m, warm_tol, opts, ws);
  solve_at(s, Complex(z.re(), etas.back()), m, opts.tol, opts, ws);
  return m;
}

}  // namespace

Complex msc(HalfPlanePoint z) {
  // (-z + sqrt(z^2-4))/2 evaluated as -2/(z + sqrt(z-2) sqrt(z+2)); the
  // principal-branch product keeps sqrt(z^2-4) ~ z at infinity on all of the
  // upper half plane and the quotient form avoids the cancellation at large z.
  const Complex zz = z.z();
  const Complex root = std::sqrt(zz - 2.0) * std::sqrt(zz + 2.0);
  return -2.0 / (zz + root);
}

std::int64_t catalan_moment(int k) {
  if (k < 0) throw InvalidInput("catalan_moment: k must be nonnegative");
  if (k > 30) throw InvalidInput("catalan_moment: k > 30 overflows the exact integer range");
  // C_{j+1} = C_j * 2(2j+1)/(j+2), exact at every step
  std::int64_t c = 1;
  for (int j = 0; j < k; ++j) c = c * 2 * (2 * j + 1) / (j + 2);
  return c;
}

SolutionVector solve_vde(const VarianceMatrix& s, HalfPlanePoint z, const SolverOpts& opts) {
  VectorXcd m = solve_with_continuation(s.entries(), z, opts);
  const double res = vde_residual(s, z, m);
  if (!all_upper(m)) throw NonConvergence("solve_vde: solution left the upper half plane", res);
  return SolutionVector{z, std::move(m), res};
}

double vde_residual(const VarianceMatrix& s, HalfPlanePoint z, const VectorXcd& m) {
  if (m.size() != s.n()) throw InvalidInput("vde_residual: dimension mismatch");
  MatvecWorkspace ws;
  VectorXcd sm;
  apply_s(s.entries(), m, sm, ws);
  return residual_of(m, sm, z.z());
}

DensityCurve sc_density(const VarianceMatrix& s, const std::vector<double>& grid, double eta,
                        bool with_components, int threads, const SolverOpts& opts) {
  if (!(eta > 0.0)) throw InvalidInput("sc_density: eta must be > 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw InvalidInput("sc_density: grid must be sorted");
  const int npts = static_cast<int>(grid.size());
  const int n = s.n();

  DensityCurve d;
  d.grid = grid;
  d.rho.assign(npts, std::numeric_limits<double>::quiet_NaN());
  d.valid.assign(npts, 0);
  d.eta_used = eta;
  if (with_components) d.components.setZero(n, npts);

  parallel_for(npts, threads, [&](int k) {
    try {
      const SolutionVector sol = solve_vde(s, HalfPlanePoint(grid[k], eta), opts);
      double mean_im = 0.0;
      for (int i = 0; i < n; ++i) mean_im += sol.m(i).imag();
      mean_im /= n;
      d.rho[k] = mean_im / M_PI;
      d.valid[k] = 1;
      if (with_components)
        for (int i = 0; i < n; ++i) d.components(i, k) = sol.m(i).imag() / M_PI;
    } catch (const NonConvergence&) {
      // leave the point flagged invalid
    }
  });
  return d;
}

SaturatedF saturated_f(const VarianceMatrix& s, const VectorXcd& m) {
  const int n = s.n();
  if (m.size() != n) throw InvalidInput("saturated_f: dimension mismatch");
  VectorXd absm(n);
  for (int i = 0; i < n; ++i) absm(i) = std::abs(m(i));
  Eigen::MatrixXd f = absm.asDiagonal() * s.entries() * absm.asDiagonal();
  const auto eg = linalg::eigh(f, /*want_vectors=*/true);
  const int top = n - 1;
  SaturatedF out;
  out.norm = eg.evals(top);
  double second = 0.0;
  for (int i = 0; i < top; ++i) second = std::max(second, std::abs(eg.evals(i)));
  out.gap = out.norm - second;
  VectorXd pf = eg.vecs.col(top);
  if (pf.sum() < 0.0) pf = -pf;
  out.pf_vector = pf;
  out.entries = std::move(f);
  return out;
}

double f_norm_identity_defect(const SaturatedF& f, const VectorXcd& m, HalfPlanePoint z) {
  const int n = static_cast<int>(m.size());
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double am = std::abs(m(i));
    num += f.pf_vector(i) * am;
    den += f.pf_vector(i) * (m(i).imag() / am);
  }
  if (std::abs(den) < 1e-14) throw DegenerateDenominator("f_norm_identity_defect");
  return std::abs(f.norm - (1.0 - z.im() * num / den));
}

double stability_inverse_norm(const VarianceMatrix& s, const VectorXcd& m, NormKind kind) {
  const int n = s.n();
  if (m.size() != n) throw InvalidInput("stability_inverse_norm: dimension mismatch");
  Eigen::MatrixXcd t = (-s.entries()).cast<Complex>();
  for (int i = 0; i < n; ++i) t.row(i) *= m(i) * m(i);
  for (int i = 0; i < n; ++i) t(i, i) += 1.0;
  if (kind == NormKind::l2) {
    const double smin = linalg::smallest_singular_value(t);
    if (smin < 1e-14) throw SingularStability("stability operator numerically singular");
    return 1.0 / smin;
  }
  Eigen::MatrixXcd inv = t.partialPivLu().inverse();
  if (!inv.allFinite()) throw SingularStability("stability operator numerically singular");
  double norm = 0.0;
  for (int i = 0; i < n; ++i) norm = std::max(norm, inv.row(i).cwiseAbs().sum());
  return norm;
}

EdgeFit edge_exponent(const std::function<double(double, double)>& rho_at, double tau0,
                      Side side) {
  constexpr double omega_lo = 1e-4;
  constexpr double omega_hi = 1e-2;
  constexpr int ladder_points = 9;

  EdgeFit fit;
  std::vector<double> logw, logr;
  double eta_floor = std::numeric_limits<double>::infinity();
  bool any_signal = false;
  for (int k = 0; k < ladder_points; ++k) {
    const double omega =
        omega_lo * std::pow(omega_hi / omega_lo, static_cast<double>(k) / (ladder_points - 1));
    const double eta = omega / 10.0;
    eta_floor = std::min(eta_floor, eta);
    double rho;
    switch (side) {
      case Side::left:
        rho = rho_at(tau0 - omega, eta);
        break;
      case Side::right:
        rho = rho_at(tau0 + omega, eta);
        break;
      default:
        rho = 0.5 * (rho_at(tau0 - omega, eta) + rho_at(tau0 + omega, eta));
        break;
    }
    fit.ladder.emplace_back(omega, rho);
    if (rho >= 10.0 * eta) any_signal = true;
    if (rho > 0.0) {
      logw.push_back(std::log(omega));
      logr.push_back(std::log(rho));
    }
  }
  fit.eta_floor = eta_floor;
  if (!any_signal)
    throw InsufficientSignal("edge_exponent: density below 10*eta at every ladder offset");
  const auto line = stats::fit_line(logw, logr);
  fit.slope = line.slope;
  if (fit.slope >= 0.40 && fit.slope <= 0.60)
    fit.kind = EdgeFit::Kind::edge_sqrt;
  else if (fit.slope >= 0.26 && fit.slope < 0.40)
    fit.kind = EdgeFit::Kind::cusp_cbrt;
  else
    fit.kind = EdgeFit::Kind::unclassified;
  return fit;
}

}  // namespace dysonlab::vde
