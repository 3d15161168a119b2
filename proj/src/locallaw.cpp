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

#include "dysonlab/locallaw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dysonlab/errors.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/linalg.hpp"
#include "dysonlab/parallel.hpp"
#include "dysonlab/rng.hpp"
#include "dysonlab/stats.hpp"
#include "dysonlab/vde.hpp"

namespace dysonlab::locallaw {

namespace {

// (U * diag(c)) * U^T for real U, assembled from two real gemms.
MatrixXcd real_spectral_product(const MatrixXd& u, const VectorXcd& c) {
  const int n = static_cast<int>(u.rows());
  MatrixXd scaled_re(n, n), scaled_im(n, n);
  for (int k = 0; k < n; ++k) {
    scaled_re.col(k) = u.col(k) * c(k).real();
    scaled_im.col(k) = u.col(k) * c(k).imag();
  }
  const MatrixXd re = linalg::gemm(scaled_re, u, false, true);
  const MatrixXd im = linalg::gemm(scaled_im, u, false, true);
  MatrixXcd out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

MatrixXcd complex_spectral_product(const MatrixXcd& u, const VectorXcd& c) {
  const int n = static_cast<int>(u.rows());
  MatrixXcd scaled(n, n);
  for (int k = 0; k < n; ++k) scaled.col(k) = u.col(k) * c(k);
  return linalg::gemm(scaled, u, false, /*adjoint_b=*/true);
}

}  // namespace

ResolventBundle::ResolventBundle(const MatrixXd& h) {
  auto eg = linalg::eigh(h, /*want_vectors=*/true);
  evals_ = std::move(eg.evals);
  real_vecs_ = std::move(eg.vecs);
  h_real_ = h;
  finish_construction();
}

ResolventBundle::ResolventBundle(const MatrixXcd& h) {
  auto eg = linalg::eigh(h, /*want_vectors=*/true);
  evals_ = std::move(eg.evals);
  cplx_vecs_ = std::move(eg.vecs);
  h_cplx_ = h;
  finish_construction();
}

void ResolventBundle::finish_construction() {
  const int n = this->n();
  VectorXcd lam = evals_.cast<Complex>();
  const MatrixXcd recon = is_real() ? real_spectral_product(*real_vecs_, lam)
                                    : complex_spectral_product(*cplx_vecs_, lam);
  const double h_norm = std::max(evals_.cwiseAbs().maxCoeff(), 1e-300);
  double defect;
  if (is_real()) {
    MatrixXcd h_c(n, n);
    h_c.real() = *h_real_;
    h_c.imag().setZero();
    defect = (recon - h_c).norm();
  } else {
    defect = (recon - *h_cplx_).norm();
  }
  reconstruction_defect_ = defect / h_norm;
  if (reconstruction_defect_ > 1e-10)
    throw IllConditioned("ResolventBundle: eigendecomposition failed to reconstruct H");
}

const MatrixXcd& ResolventBundle::resolvent(HalfPlanePoint z) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto key = std::make_pair(z.re(), z.im());
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;

  const int n = this->n();
  VectorXcd c(n);
  for (int k = 0; k < n; ++k) c(k) = 1.0 / (evals_(k) - z.z());
  auto g = std::make_unique<MatrixXcd>(is_real() ? real_spectral_product(*real_vecs_, c)
                                                 : complex_spectral_product(*cplx_vecs_, c));
  // Ward identity: sum_j |G_ij|^2 = Im G_ii / eta at every evaluation
  VectorXd row_sums(n);
  kernels::abs2_row_sums(g->data(), row_sums.data(), n);
  double ward = 0.0;
  for (int i = 0; i < n; ++i)
    ward = std::max(ward, std::abs(row_sums(i) - (*g)(i, i).imag() / z.im()));
  max_ward_defect_ = std::max(max_ward_defect_, ward);

  const MatrixXcd& ref = *g;
  cache_[key] = std::move(g);
  return ref;
}

MatrixXcd ResolventBundle::h_times(const MatrixXcd& g) const {
  if (is_real()) {
    const MatrixXd re = linalg::gemm(*h_real_, MatrixXd(g.real()));
    const MatrixXd im = linalg::gemm(*h_real_, MatrixXd(g.imag()));
    MatrixXcd out(g.rows(), g.cols());
    out.real() = re;
    out.imag() = im;
    return out;
  }
  return linalg::gemm(*h_cplx_, g);
}

ErrorReport error_report(ResolventBundle& bundle, HalfPlanePoint z, const Reference& ref,
                         const mde::SelfEnergySpec& model, const MatrixXcd& t,
                         const VectorXcd& x, const VectorXcd& y) {
  const int n = bundle.n();
  if ((ref.diag && ref.diag->size() != n) || (ref.full && ref.full->rows() != n))
    throw InvalidInput("error_report: reference dimension mismatch");
  const MatrixXcd& g = bundle.resolvent(z);

  ErrorReport rep;
  rep.z = z.z();
  rep.n = n;

  // entrywise
  if (ref.diag) {
    double best = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Complex d = (i == j) ? g(i, j) - (*ref.diag)(i) : g(i, j);
        best = std::max(best, std::norm(d));
      }
    rep.entrywise = std::sqrt(best);
  } else {
    rep.entrywise = kernels::max_abs_diff(g.data(), ref.full->data(),
                                          static_cast<std::size_t>(n) * n);
  }

  // averaged: |tr T (G - M)| / n
  {
    Complex tr(0.0, 0.0);
    if (ref.diag) {
      MatrixXcd diff = g;
      for (int i = 0; i < n; ++i) diff(i, i) -= (*ref.diag)(i);
      tr = (t * diff).trace();
    } else {
      tr = (t * (g - *ref.full)).trace();
    }
    rep.averaged = std::abs(tr) / n;
  }

  // isotropic: |<x, (G - M) y>|
  {
    VectorXcd gy = g * y;
    Complex my(0.0, 0.0);
    if (ref.diag) {
      Complex acc(0.0, 0.0);
      for (int i = 0; i < n; ++i) acc += std::conj(x(i)) * (*ref.diag)(i)*y(i);
      my = acc;
    } else {
      my = x.dot(*ref.full * y);
    }
    rep.isotropic = std::abs(x.dot(gy) - my);
  }

  // error matrix D = I + (z + S[G]) G, cross-checked against HG + S[G] G
  {
    const MatrixXcd sg = mde::apply_self_energy(model, g);
    MatrixXcd sgg;
    if (model.kind == mde::SelfEnergySpec::Kind::isotropic) {
      sgg = sg(0, 0) * g;
    } else if (model.kind == mde::SelfEnergySpec::Kind::diagonal) {
      sgg = g;
      for (int i = 0; i < n; ++i) sgg.row(i) *= sg(i, i);
    } else {
      sgg = linalg::gemm(sg, g);
    }
    MatrixXcd d = z.z() * g + sgg;
    d.diagonal().array() += 1.0;

    double best = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) best = std::max(best, std::norm(d(i, j)));
    rep.d_maxnorm = std::sqrt(best);

    const MatrixXcd d2 = bundle.h_times(g) + sgg;
    rep.d_identity_defect =
        kernels::max_abs_diff(d.data(), d2.data(), static_cast<std::size_t>(n) * n);
  }
  return rep;
}

namespace {

VectorXcd unit_vector_from_counter(int n, std::uint64_t tag) {
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = crng::normal2(0x5eedULL, tag, static_cast<std::uint64_t>(i), 0);
    v(i) = Complex(a, b);
  }
  v /= v.norm();
  return v;
}

}  // namespace

ScalingStudy scaling_study(const ensembles::EnsembleSpec& ensemble,
                           const std::vector<int>& n_list, const std::vector<double>& eta_list,
                           int seeds, double E, int threads) {
  if (n_list.empty() || eta_list.empty() || seeds < 1)
    throw InvalidInput("scaling_study: empty axis");
  for (int n : n_list)
    for (double eta : eta_list)
      if (n * eta < 4.0) throw InvalidInput("scaling_study: n*eta >= 4 required");

  // deterministic reference per n at each eta, from the model Dyson equation
  struct RefData {
    std::vector<VectorXcd> m;  // per eta
  };
  std::map<int, RefData> refs;
  for (int n : n_list) {
    const VarianceMatrix s = ensemble.effective_variances();
    if (s.n() != n) throw InvalidInput("scaling_study: ensemble n disagrees with n_list");
    RefData rd;
    vde::SolverOpts opts;
    opts.tol = 1e-12;
    for (double eta : eta_list)
      rd.m.push_back(vde::solve_vde(s, HalfPlanePoint(E, eta), opts).m);
    // bulk check at the largest eta ladder point scale
    double rho = 0.0;
    for (int i = 0; i < n; ++i) rho += rd.m.back()(i).imag();
    rho /= (n * M_PI);
    if (rho < 0.05) throw BulkViolation("scaling_study: rho(E) < 0.05");
    refs[n] = std::move(rd);
  }

  ScalingStudy study;
  std::mutex agg;
  for (int n : n_list) {
    const mde::SelfEnergySpec model = mde::SelfEnergySpec::diagonal(ensemble.effective_variances());
    const MatrixXcd t_obs = MatrixXcd::Identity(n, n);
    const VectorXcd x = unit_vector_from_counter(n, 1);
    const VectorXcd y = unit_vector_from_counter(n, 2);
    const RefData& ref_n = refs.at(n);
    std::vector<std::vector<ErrorReport>> per_seed(seeds);
    parallel_for(seeds, threads, [&](int seed) {
      std::unique_ptr<ResolventBundle> bundle;
      if (ensemble.symmetry == ensembles::Symmetry::real_symmetric)
        bundle = std::make_unique<ResolventBundle>(
            ensembles::sample_one_real(ensemble, static_cast<std::uint64_t>(seed), 0));
      else
        bundle = std::make_unique<ResolventBundle>(
            ensembles::sample_one(ensemble, static_cast<std::uint64_t>(seed), 0));
      std::vector<ErrorReport> reports;
      for (std::size_t ke = 0; ke < eta_list.size(); ++ke) {
        const HalfPlanePoint z(E, eta_list[ke]);
        reports.push_back(error_report(*bundle, z, Reference::vector(ref_n.m[ke]), model,
                                       t_obs, x, y));
      }
      std::lock_guard<std::mutex> lock(agg);
      per_seed[seed] = std::move(reports);
      study.max_ward_defect = std::max(study.max_ward_defect, bundle->max_ward_defect());
    });
    for (int seed = 0; seed < seeds; ++seed)
      for (std::size_t ke = 0; ke < eta_list.size(); ++ke) {
        const ErrorReport& r = per_seed[seed][ke];
        study.rows.push_back(ScalingRow{n, eta_list[ke], seed, r.entrywise, r.isotropic,
                                        r.averaged, r.d_maxnorm});
        study.max_d_identity_defect =
            std::max(study.max_d_identity_defect, r.d_identity_defect);
      }
  }

  // medians / percentiles per axis point, slopes of the medians vs log(n eta)
  std::vector<double> lx, med_e, med_i, med_a, med_d;
  for (int n : n_list) {
    for (double eta : eta_list) {
      std::vector<double> ve, vi, va, vd;
      for (const auto& r : study.rows)
        if (r.n == n && r.eta == eta) {
          ve.push_back(r.entrywise);
          vi.push_back(r.isotropic);
          va.push_back(r.averaged);
          vd.push_back(r.d_maxnorm);
        }
      ErrorReport med, p90;
      med.entrywise = stats::median(ve);
      med.isotropic = stats::median(vi);
      med.averaged = stats::median(va);
      med.d_maxnorm = stats::median(vd);
      p90.entrywise = stats::percentile(ve, 0.9);
      p90.isotropic = stats::percentile(vi, 0.9);
      p90.averaged = stats::percentile(va, 0.9);
      p90.d_maxnorm = stats::percentile(vd, 0.9);
      med.n = p90.n = n;
      study.axis_stats.emplace_back(n, eta, med, p90);
      lx.push_back(std::log(n * eta));
      med_e.push_back(std::log(med.entrywise));
      med_i.push_back(std::log(med.isotropic));
      med_a.push_back(std::log(med.averaged));
      med_d.push_back(std::log(med.d_maxnorm));
    }
  }
  if (lx.size() < 4) throw InvalidInput("scaling_study: slope fits need >= 4 axis points");
  const auto fe = stats::fit_line(lx, med_e);
  const auto fi = stats::fit_line(lx, med_i);
  const auto fa = stats::fit_line(lx, med_a);
  const auto fd = stats::fit_line(lx, med_d);
  study.entrywise = {fe.slope, 2.0 * fe.slope_stderr};
  study.isotropic = {fi.slope, 2.0 * fi.slope_stderr};
  study.averaged = {fa.slope, 2.0 * fa.slope_stderr};
  study.d_maxnorm = {fd.slope, 2.0 * fd.slope_stderr};
  return study;
}

double delocalization_stat(const ResolventBundle& bundle, std::pair<double, double> window) {
  const int n = bundle.n();
  double best = -1.0;
  for (int k = 0; k < n; ++k) {
    const double lam = bundle.eigenvalues()(k);
    if (lam < window.first || lam > window.second) continue;
    double sup;
    if (bundle.is_real())
      sup = bundle.real_eigenvectors().col(k).cwiseAbs().maxCoeff();
    else
      sup = bundle.complex_eigenvectors().col(k).cwiseAbs().maxCoeff();
    best = std::max(best, std::sqrt(static_cast<double>(n)) * sup);
  }
  if (best < 0.0) throw EmptyWindow("delocalization_stat: no eigenvalue in window");
  return best;
}

RigidityReport rigidity_report(const VectorXd& lambdas, const DensityCurve& d) {
  const int n = static_cast<int>(lambdas.size());
  const std::vector<double> gam = quantiles(d, n);
  RigidityReport rep;
  for (int i = 1; i <= n; ++i) {
    const double g = gam[i - 1];
    if (d.rho_at(g) < 0.05) continue;  // bulk only
    const double dev = std::abs(lambdas(i - 1) - g);
    rep.per_index.emplace_back(i, dev);
    rep.max_dev = std::max(rep.max_dev, dev);
  }
  return rep;
}

double SmoothedIndicator::f(double x) const {
  auto ramp = [](double t) {  // C^2 quintic smoothstep on [0,1]
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  };
  if (x < tau1) return ramp((x - (tau1 - eta0)) / eta0);
  if (x > tau2) return ramp(((tau2 + eta0) - x) / eta0);
  return 1.0;
}

double SmoothedIndicator::df(double x) const {
  auto dramp = [](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (1.0 - t) * (1.0 - t);
  };
  if (x < tau1) return dramp((x - (tau1 - eta0)) / eta0) / eta0;
  if (x > tau2) return -dramp(((tau2 + eta0) - x) / eta0) / eta0;
  return 0.0;
}

double SmoothedIndicator::ddf(double x) const {
  auto ddramp = [](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
  };
  if (x < tau1) return ddramp((x - (tau1 - eta0)) / eta0) / (eta0 * eta0);
  if (x > tau2) return ddramp(((tau2 + eta0) - x) / eta0) / (eta0 * eta0);
  return 0.0;
}

namespace {

// chi: even, 1 on [-1,1], cosine taper to 0 at |eta| = 2
double chi(double eta) {
  const double a = std::abs(eta);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (a - 1.0));
  return c * c;
}

double dchi(double eta) {
  const double a = std::abs(eta);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double s = std::sin(std::numbers::pi * (a - 1.0));
  return -0.5 * std::numbers::pi * s * (eta > 0 ? 1.0 : -1.0);
}

struct HsQuadrature {
  int sigma_nodes;
  int eta_panels;
  int eta_nodes_per_panel;
};

double hs_eval(const std::function<Complex(Complex)>& m_nu, const SmoothedIndicator& f,
               const HsQuadrature& q) {
  // Integrands are even in eta (m(conj z) = conj m(z) for real measures), so
  // everything is 2x the eta > 0 half plane.
  std::vector<double> sn, sw;
  std::vector<std::pair<double, double>> windows = {{f.tau1 - f.eta0, f.tau1},
                                                    {f.tau2, f.tau2 + f.eta0}};

  // L1 = 2 int_0^2 deta int dsigma eta f''(sigma) chi(eta) Im m
  double l1 = 0.0;
  {
    const double eta_min = 1e-7;
    const double ratio = std::pow(2.0 / eta_min, 1.0 / q.eta_panels);
    for (const auto& win : windows) {
      stats::gauss_legendre(q.sigma_nodes, win.first, win.second, sn, sw);
      std::vector<double> fpp(sn.size());
      for (std::size_t i = 0; i < sn.size(); ++i) fpp[i] = f.ddf(sn[i]);
      double lo = eta_min;
      for (int p = 0; p < q.eta_panels; ++p) {
        const double hi = lo * ratio;
        std::vector<double> en, ew;
        stats::gauss_legendre(q.eta_nodes_per_panel, lo, hi, en, ew);
        for (std::size_t ke = 0; ke < en.size(); ++ke) {
          const double eta = en[ke];
          const double ch = chi(eta);
          if (ch == 0.0) continue;
          double inner = 0.0;
          for (std::size_t i = 0; i < sn.size(); ++i)
            inner += sw[i] * fpp[i] * m_nu(Complex(sn[i], eta)).imag();
          l1 += 2.0 * ew[ke] * eta * ch * inner;
        }
        lo = hi;
      }
    }
  }

  // L2, L3 live on eta in [1,2] where chi' is supported. Note the L2 weight
  // is f itself (from the Cauchy kernel identity), so its sigma-integral runs
  // over the whole support of f, not just the ramps.
  double l2 = 0.0, l3 = 0.0;
  {
    std::vector<double> en, ew;
    stats::gauss_legendre(q.eta_panels, 1.0, 2.0, en, ew);

    std::vector<double> fn, fw;
    stats::gauss_legendre(4 * q.sigma_nodes, f.tau1 - f.eta0, f.tau2 + f.eta0, fn, fw);
    std::vector<double> fv(fn.size());
    for (std::size_t i = 0; i < fn.size(); ++i) fv[i] = f.f(fn[i]);

    for (std::size_t ke = 0; ke < en.size(); ++ke) {
      const double eta = en[ke];
      const double dch = dchi(eta);
      double l2_acc = 0.0;
      for (std::size_t i = 0; i < fn.size(); ++i)
        l2_acc += fw[i] * fv[i] * m_nu(Complex(fn[i], eta)).imag();
      l2 += 2.0 * ew[ke] * dch * l2_acc;

      double re_acc = 0.0;
      for (const auto& win : windows) {
        stats::gauss_legendre(q.sigma_nodes, win.first, win.second, sn, sw);
        for (std::size_t i = 0; i < sn.size(); ++i)
          re_acc += sw[i] * f.df(sn[i]) * m_nu(Complex(sn[i], eta)).real();
      }
      l3 += 2.0 * ew[ke] * eta * dch * re_acc;
    }
  }
  return -(l1 + l2 + l3) / (2.0 * std::numbers::pi);
}

}  // namespace

double hs_count(const std::function<Complex(Complex)>& m_nu, const SmoothedIndicator& f_spec,
                double* err_est) {
  if (!(f_spec.eta0 >= 1e-4)) throw InvalidInput("hs_count: eta0 >= 1e-4 required");
  if (!(f_spec.tau2 > f_spec.tau1)) throw InvalidInput("hs_count: tau2 > tau1 required");
  const HsQuadrature fine{48, 48, 8};
  const HsQuadrature coarse{32, 32, 6};
  const double v_fine = hs_eval(m_nu, f_spec, fine);
  const double v_coarse = hs_eval(m_nu, f_spec, coarse);
  const double err = std::abs(v_fine - v_coarse);
  if (err_est) *err_est = err;
  if (err > 1e-3) throw QuadratureFailure("hs_count: estimated quadrature error > 1e-3");
  return v_fine;
}

}  // namespace dysonlab::locallaw
