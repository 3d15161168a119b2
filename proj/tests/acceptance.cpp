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

// End-to-end acceptance suite. Every check runs at a pinned tolerance and
// prints one PASS/FAIL line; the exit code is the number of failures.
// Criterion 7's cusp check is expected to fail by the mathematics of the
// near-critical block matrix; see the informative line it prints.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dysonlab/dbm.hpp"
#include "dysonlab/ensembles.hpp"
#include "dysonlab/errors.hpp"
#include "dysonlab/io.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/linalg.hpp"
#include "dysonlab/locallaw.hpp"
#include "dysonlab/mde.hpp"
#include "dysonlab/parallel.hpp"
#include "dysonlab/rng.hpp"
#include "dysonlab/stats.hpp"
#include "dysonlab/vde.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace dysonlab;
using Complex = std::complex<double>;
using Clock = std::chrono::steady_clock;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

namespace {

int g_threads = 0;

struct Harness {
  int failures = 0;
  void run(const std::string& name, const std::function<std::optional<std::string>()>& body) {
    const auto t0 = Clock::now();
    std::optional<std::string> failure;
    try {
      failure = body();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (failure) {
      ++failures;
      std::printf("[FAIL] %s (%.1f s): %s\n", name.c_str(), secs, failure->c_str());
    } else {
      std::printf("[PASS] %s (%.1f s)\n", name.c_str(), secs);
    }
    std::fflush(stdout);
  }
};

VarianceMatrix random_positive_s(int n, double lo, double hi, std::uint64_t tag) {
  MatrixXd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double u = crng::uniform(0xace5ULL, tag, static_cast<std::uint64_t>(i) * n + j, 0);
      s(i, j) = s(j, i) = (lo + (hi - lo) * u) / n;
    }
  return VarianceMatrix::from_entries(std::move(s));
}

VarianceMatrix block4x4(double d, int n) {
  Eigen::MatrixXd bv(4, 4);
  bv << d, 1, 1, 1, 1, d, d, d, 1, d, d, d, 1, d, d, d;
  return VarianceMatrix::block_profile(n, bv);
}

double curve_rho(const VarianceMatrix& s, double tau, double eta, double tol = 1e-10) {
  vde::SolverOpts opts;
  opts.tol = tol;
  const auto sol = vde::solve_vde(s, HalfPlanePoint(tau, eta), opts);
  double acc = 0.0;
  for (int i = 0; i < s.n(); ++i) acc += sol.m(i).imag();
  return acc / (s.n() * M_PI);
}

std::vector<double> linspace(double lo, double hi, int pts) {
  std::vector<double> g(pts);
  for (int k = 0; k < pts; ++k) g[k] = lo + (hi - lo) * k / (pts - 1);
  return g;
}

DensityCurve semicircle_curve(int pts = 4801, double eta = 1e-4) {
  return vde::sc_density(VarianceMatrix::wigner(16), linspace(-3.0, 3.0, pts), eta, false,
                         g_threads);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// shared state across criteria
double g_max_ward = 0.0;
double g_max_d_identity = 0.0;
locallaw::ScalingStudy g_study;
bool g_study_ok = false;

std::optional<std::string> criterion1() {
  const auto s = VarianceMatrix::wigner(200);
  std::vector<std::pair<double, double>> zs;
  for (double e : {-2.2, -1.6, -0.9, -0.3, 0.0, 0.5, 1.0, 1.5, 1.9, 2.3})
    for (double eta : {0.01, 0.0464, 0.215, 1.0, 4.64}) zs.emplace_back(e, eta);
  std::vector<double> dev(zs.size(), 0.0);
  vde::SolverOpts opts;
  opts.tol = 1e-12;
  const auto t0 = Clock::now();
  parallel_for(static_cast<int>(zs.size()), g_threads, [&](int k) {
    const HalfPlanePoint z(zs[k].first, zs[k].second);
    const auto sol = vde::solve_vde(s, z, opts);
    const Complex ref = vde::msc(z);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) worst = std::max(worst, std::abs(sol.m(i) - ref));
    dev[k] = worst;
  });
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  double worst = 0.0;
  for (double d : dev) worst = std::max(worst, d);
  if (worst > 1e-10)
    return "max deviation from the scalar solution " + fmt(worst) + " > 1e-10";
  if (secs > 5.0) return "runtime " + fmt(secs) + " s > 5 s";
  return std::nullopt;
}

std::optional<std::string> criterion2() {
  for (int k = 0; k <= 6; ++k) {
    const double q = oracles::semicircle_moment(2 * k);
    const double c = static_cast<double>(vde::catalan_moment(k));
    if (std::abs(q - c) > 1e-6)
      return "moment 2k=" + std::to_string(2 * k) + " quadrature " + fmt(q) + " vs catalan " +
             fmt(c);
  }
  return std::nullopt;
}

std::optional<std::string> criterion3() {
  vde::SolverOpts opts;
  opts.tol = 1e-12;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_positive_s(48, 0.1 + 0.05 * (trial % 4), 2.0, 300 + trial);
    for (int kz = 0; kz < 10; ++kz) {
      const double e = -2.5 + 5.0 * crng::uniform(3, trial, kz, 0);
      const double eta = std::pow(10.0, -3.0 + 3.0 * crng::uniform(3, trial, kz, 1));
      const HalfPlanePoint z(e, eta);
      const auto sol = vde::solve_vde(s, z, opts);
      const auto f = vde::saturated_f(s, sol.m);
      worst = std::max(worst, vde::f_norm_identity_defect(f, sol.m, z));
    }
  }
  if (worst > 1e-8) return "max norm-identity defect " + fmt(worst) + " > 1e-8";
  return std::nullopt;
}

std::optional<std::string> criterion4() {
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 16 + 8 * (trial % 7);
    auto s_mat = random_positive_s(n, 0.0, 2.2, 400 + trial).entries();
    if (trial % 7 == 3) {  // degenerate rows are allowed
      s_mat.row(n / 2).setZero();
      s_mat.col(n / 2).setZero();
    }
    const auto s = VarianceMatrix::from_entries(s_mat);
    const double e = -3.0 + 6.0 * crng::uniform(4, trial, 0, 0);
    const double eta = std::pow(10.0, -3.0 + 4.0 * crng::uniform(4, trial, 1, 0));
    const HalfPlanePoint z(e, eta);
    const auto sol = vde::solve_vde(s, z);
    double sup = 0.0;
    for (int i = 0; i < n; ++i) sup = std::max(sup, std::abs(sol.m(i)));
    if (sup > 1.0 / eta + 1e-9)
      return "sup bound violated: " + fmt(sup) + " > 1/eta = " + fmt(1.0 / eta);
    const double l2 = sol.m.norm() / std::sqrt(static_cast<double>(n));
    if (l2 > 2.0 / std::abs(z.z()) + 1e-9)
      return "l2 bound violated: " + fmt(l2) + " > 2/|z| = " + fmt(2.0 / std::abs(z.z()));
  }
  return std::nullopt;
}

std::optional<std::string> criterion5() {
  const int n = 32;
  const auto s = random_positive_s(n, 0.2, 1.8, 55);
  const auto spec = mde::SelfEnergySpec::diagonal(s);
  const MatrixXcd a = MatrixXcd::Zero(n, n);
  mde::MdeOpts mopts;
  mopts.tol = 1e-11;
  vde::SolverOpts vopts;
  vopts.tol = 1e-12;
  double worst_diag = 0.0, worst_off = 0.0;
  for (int kz = 0; kz < 10; ++kz) {
    const double e = -2.0 + 4.0 * crng::uniform(5, kz, 0, 0);
    const double eta = std::pow(10.0, -2.0 + 2.0 * crng::uniform(5, kz, 1, 0));
    const HalfPlanePoint z(e, eta);
    const auto msol = mde::solve_mde(spec, a, z, mopts);
    const auto vsol = vde::solve_vde(s, z, vopts);
    for (int i = 0; i < n; ++i) {
      worst_diag = std::max(worst_diag, std::abs(msol.M(i, i) - vsol.m(i)));
      for (int j = 0; j < n; ++j)
        if (i != j) worst_off = std::max(worst_off, std::abs(msol.M(i, j)));
    }
  }
  if (worst_diag > 1e-8) return "diagonal mismatch " + fmt(worst_diag) + " > 1e-8";
  if (worst_off > 1e-10) return "off-diagonal mass " + fmt(worst_off) + " > 1e-10";
  return std::nullopt;
}

std::optional<std::string> criterion6() {
  const int n = 24;
  const auto s = random_positive_s(n, 0.3, 1.7, 66);
  const auto spec = mde::SelfEnergySpec::diagonal(s);
  const MatrixXcd a = MatrixXcd::Zero(n, n);
  for (const auto& z : {HalfPlanePoint(0.5, 0.2), HalfPlanePoint(0.0, 1.0)}) {
    mde::MdeOpts opts;
    opts.tol = 1e-12;
    const auto sol = mde::solve_mde(spec, a, z, opts);
    const auto parts = mde::polar_decompose(sol);
    const double recon = (parts.Q * parts.Y * parts.Q.adjoint() - sol.M).norm();
    if (recon > 1e-10) return "polar reconstruction defect " + fmt(recon);

    const auto op = mde::saturated_superop(spec, parts);
    const MatrixXcd qi = parts.Q.partialPivLu().inverse();
    for (int t = 0; t < 10; ++t) {
      MatrixXcd r(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const auto [x, y] = crng::normal2(6, t, static_cast<std::uint64_t>(i) * n + j, 0);
          r(i, j) = Complex(x, y);
        }
      const MatrixXcd lhs = r - sol.M * mde::apply_self_energy(spec, r) * sol.M;
      MatrixXcd inner = qi * r * qi.adjoint();
      inner -= parts.Y * op.apply(inner) * parts.Y;
      const MatrixXcd rhs = parts.Q * inner * parts.Q.adjoint();
      const double defect = (lhs - rhs).cwiseAbs().maxCoeff();
      if (defect > 1e-10) return "stability factorization identity defect " + fmt(defect);
    }

    vde::SolverOpts vopts;
    vopts.tol = 1e-13;
    const auto vsol = vde::solve_vde(s, z, vopts);
    const auto f = vde::saturated_f(s, vsol.m);
    const auto spectrum = mde::superop_norm_and_gap(op);
    if (std::abs(spectrum.norm - f.norm) > 1e-10)
      return "saturated norms disagree: " + fmt(spectrum.norm) + " vs " + fmt(f.norm);
  }
  return std::nullopt;
}

std::optional<std::string> criterion7() {
  std::string failures;
  // (a) square-root edge of the semicircle
  const auto wig = VarianceMatrix::wigner(8);
  const auto edge_fit = vde::edge_exponent(
      [&](double t, double e) { return curve_rho(wig, t, e); }, 2.0, vde::Side::left);
  if (std::abs(edge_fit.slope - 0.5) > 0.05)
    failures += "edge slope " + fmt(edge_fit.slope) + " not within 0.5 +- 0.05; ";

  // (b) cusp at the printed near-critical coupling 0.1 (4-point reduction of
  // the block matrix; identical density). The interior minimum is located by
  // golden-section search on rho at eta = 1e-7.
  const auto s10 = block4x4(0.10, 4);
  {
    double best_t = 0.40, best_r = 1e300;
    for (double t = 0.40; t <= 0.45; t += 5e-4) {
      const double r = curve_rho(s10, t, 1e-7);
      if (r < best_r) {
        best_r = r;
        best_t = t;
      }
    }
    double a = best_t - 1e-3, b = best_t + 1e-3;
    constexpr double gr = 0.6180339887498949;
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = curve_rho(s10, c, 1e-7), fe = curve_rho(s10, e, 1e-7);
    for (int it = 0; it < 40; ++it) {
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - gr * (b - a);
        fc = curve_rho(s10, c, 1e-7);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + gr * (b - a);
        fe = curve_rho(s10, e, 1e-7);
      }
    }
    const double tau0 = 0.5 * (a + b);
    const auto cusp_fit = vde::edge_exponent(
        [&](double t, double ee) { return curve_rho(s10, t, ee); }, tau0, vde::Side::both);
    if (std::abs(cusp_fit.slope - 1.0 / 3.0) > 0.07)
      failures += "cusp slope at coupling 0.1 is " + fmt(cusp_fit.slope) +
                  ", not within 1/3 +- 0.07 (tau0 = " + fmt(tau0) + "); ";
    // informative: the family's support gap closes at coupling ~0.103979,
    // where the same measurement reads the cubic-root law
    const auto scrit = block4x4(0.103979, 4);
    double bt = 0.40, br = 1e300;
    for (double t = 0.40; t <= 0.45; t += 5e-4) {
      const double r = curve_rho(scrit, t, 1e-8);
      if (r < br) {
        br = r;
        bt = t;
      }
    }
    const auto crit_fit = vde::edge_exponent(
        [&](double t, double ee) { return curve_rho(scrit, t, ee); }, bt, vde::Side::both);
    std::printf("       (info) coupling 0.1 has a residual support gap ~1.3e-3 around 0.4145;\n"
                "       at the critical coupling 0.103979 the same ladder reads slope %.4f\n",
                crit_fit.slope);
  }

  // (c) the small-gap member: two support components on the tau >= 0 half
  // line (the density is even in tau)
  const auto s07 = block4x4(0.07, 200);
  const auto d = vde::sc_density(s07, linspace(0.0, 3.0, 601), 1e-3, false, g_threads);
  const auto sup = support_set(d, 1e-2);
  if (sup.intervals.size() != 2)
    failures += "small-gap support has " + std::to_string(sup.intervals.size()) +
                " intervals, expected 2; ";

  if (!failures.empty()) return failures;
  return std::nullopt;
}

std::optional<std::string> criterion9() {
  const auto t0 = Clock::now();
  const auto ensemble =
      ensembles::EnsembleSpec::make_wigner(1000, ensembles::Symmetry::complex_hermitian);
  g_study = locallaw::scaling_study(ensemble, {1000}, {0.5, 0.2, 0.1, 0.05, 0.02, 0.01}, 20, 0.0,
                                    g_threads);
  g_study_ok = true;
  g_max_ward = std::max(g_max_ward, g_study.max_ward_defect);
  g_max_d_identity = std::max(g_max_d_identity, g_study.max_d_identity_defect);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::string failures;
  if (std::abs(g_study.entrywise.slope + 0.5) > 0.15)
    failures += "entrywise slope " + fmt(g_study.entrywise.slope) + " not in -0.5 +- 0.15; ";
  if (std::abs(g_study.d_maxnorm.slope + 0.5) > 0.15)
    failures += "error-matrix slope " + fmt(g_study.d_maxnorm.slope) + " not in -0.5 +- 0.15; ";
  if (std::abs(g_study.averaged.slope + 1.0) > 0.25)
    failures += "averaged slope " + fmt(g_study.averaged.slope) + " not in -1.0 +- 0.25; ";
  if (secs > 600.0) failures += "runtime " + fmt(secs) + " s > 600 s; ";
  // averaged errors are one order more precise: the ratio stays below one at
  // every axis point, and per seed at the smallest eta for >= 90% of seeds
  for (double eta : {0.5, 0.2, 0.1, 0.05, 0.02, 0.01}) {
    std::vector<double> ratios;
    int averaged_wins = 0, total = 0;
    for (const auto& row : g_study.rows)
      if (row.eta == eta) {
        ratios.push_back(row.averaged / row.entrywise);
        ++total;
        if (row.averaged < row.entrywise) ++averaged_wins;
      }
    if (stats::median(ratios) > 1.0) {
      failures += "median averaged/entrywise ratio above 1 at eta " + fmt(eta) + "; ";
      break;
    }
    if (eta == 0.01 && averaged_wins * 10 < total * 9)
      failures += "averaged beat entrywise in only " + std::to_string(averaged_wins) + "/" +
                  std::to_string(total) + " seeds at eta 0.01; ";
  }
  std::printf("       (info) slopes: entrywise %.3f, averaged %.3f, D %.3f, isotropic %.3f\n",
              g_study.entrywise.slope, g_study.averaged.slope, g_study.d_maxnorm.slope,
              g_study.isotropic.slope);
  if (!failures.empty()) return failures;
  return std::nullopt;
}

std::optional<std::string> criterion8() {
  // direct Ward / error-matrix identity audit on fresh bundles, folded
  // together with everything the scaling study evaluated
  const int n = 300;
  const auto s = VarianceMatrix::wigner(n);
  const auto model = mde::SelfEnergySpec::diagonal(s);
  for (auto sym : {ensembles::Symmetry::real_symmetric, ensembles::Symmetry::complex_hermitian}) {
    const auto spec = ensembles::EnsembleSpec::make_wigner(n, sym);
    locallaw::ResolventBundle bundle =
        sym == ensembles::Symmetry::real_symmetric
            ? locallaw::ResolventBundle(ensembles::sample_one_real(spec, 808, 0))
            : locallaw::ResolventBundle(ensembles::sample_one(spec, 808, 0));
    VectorXcd x(n), y(n);
    for (int i = 0; i < n; ++i) {
      const auto [xa, xb] = crng::normal2(8, 0, i, 0);
      const auto [ya, yb] = crng::normal2(8, 1, i, 0);
      x(i) = Complex(xa, xb);
      y(i) = Complex(ya, yb);
    }
    x /= x.norm();
    y /= y.norm();
    for (double eta : {1.0, 0.1, 0.02}) {
      for (double e : {0.0, -1.3, 0.8}) {
        const HalfPlanePoint z(e, eta);
        const auto m = vde::solve_vde(s, z).m;
        const auto rep = locallaw::error_report(bundle, z, locallaw::Reference::vector(m), model,
                                                MatrixXcd::Identity(n, n), x, y);
        g_max_d_identity = std::max(g_max_d_identity, rep.d_identity_defect);
      }
    }
    g_max_ward = std::max(g_max_ward, bundle.max_ward_defect());
  }
  std::printf("       (info) max Ward defect %.2e, max error-matrix identity defect %.2e\n",
              g_max_ward, g_max_d_identity);
  if (g_max_ward > 1e-9) return "Ward identity defect " + fmt(g_max_ward) + " > 1e-9";
  if (g_max_d_identity > 1e-12)
    return "error-matrix identity defect " + fmt(g_max_d_identity) + " > 1e-12";
  return std::nullopt;
}

std::optional<std::string> criterion10() {
  const int n = 1000, seeds = 50;
  const auto spec = ensembles::EnsembleSpec::make_wigner(n, ensembles::Symmetry::real_symmetric);
  std::vector<double> stat(seeds);
  parallel_for(seeds, g_threads, [&](int k) {
    locallaw::ResolventBundle bundle(
        ensembles::sample_one_real(spec, 1000 + k, 0));
    stat[k] = locallaw::delocalization_stat(bundle, {-1.0, 1.0});
  });
  int ok = 0;
  double worst = 0.0;
  for (double v : stat) {
    if (v <= 6.6) ++ok;
    worst = std::max(worst, v);
  }
  std::printf("       (info) %d/%d seeds within 6.6, worst %.3f\n", ok, seeds, worst);
  if (ok < 48) return "only " + std::to_string(ok) + "/50 seeds within 6.6";
  return std::nullopt;
}

std::optional<std::string> criterion11() {
  const int n = 1000, seeds = 50;
  const auto d = semicircle_curve(6001, 1e-4);
  const auto gam = quantiles(d, 4000);  // inverse-cdf table for the resample
  const auto spec = ensembles::EnsembleSpec::make_wigner(n, ensembles::Symmetry::complex_hermitian);
  std::vector<double> dev(seeds), dev_poisson(seeds);
  parallel_for(seeds, g_threads, [&](int k) {
    const auto eg = linalg::eigh(ensembles::sample_one(spec, 2000 + k, 0), false);
    dev[k] = locallaw::rigidity_report(eg.evals, d).max_dev;
    VectorXd resampled(n);
    for (int i = 0; i < n; ++i) {
      const double u = crng::uniform(0xb00ULL, k, i, 0);
      resampled(i) = gam[std::min<std::size_t>(gam.size() - 1,
                                               static_cast<std::size_t>(u * gam.size()))];
    }
    std::sort(resampled.data(), resampled.data() + n);
    dev_poisson[k] = locallaw::rigidity_report(resampled, d).max_dev;
  });
  int ok = 0, contrast = 0;
  double worst = 0.0;
  for (int k = 0; k < seeds; ++k) {
    if (dev[k] <= 0.14) ++ok;
    if (dev_poisson[k] > dev[k]) ++contrast;
    worst = std::max(worst, dev[k]);
  }
  std::printf("       (info) rigidity: %d/%d within 0.14 (worst %.4f); contrast %d/%d\n", ok,
              seeds, worst, contrast, seeds);
  if (ok < 48) return "only " + std::to_string(ok) + "/50 seeds within 0.14";
  if (contrast < 45) return "resampling contrast only " + std::to_string(contrast) + "/50";
  return std::nullopt;
}

std::optional<std::string> criterion12() {
  const int n = 500;
  const auto spec = ensembles::EnsembleSpec::make_wigner(n, ensembles::Symmetry::complex_hermitian);
  const auto eg = linalg::eigh(ensembles::sample_one(spec, 4242, 0), false);
  auto m_emp = [&](Complex z) {
    Complex acc(0, 0);
    for (int k = 0; k < n; ++k) acc += 1.0 / (eg.evals(k) - z);
    return acc / static_cast<double>(n);
  };
  const locallaw::SmoothedIndicator window{-0.9, 0.7, 1e-3};
  double direct = 0.0;
  for (int k = 0; k < n; ++k) direct += window.f(eg.evals(k));
  direct /= n;
  const double counted = locallaw::hs_count(m_emp, window);
  if (std::abs(counted - direct) > 2e-3)
    return "window count " + fmt(counted) + " vs direct " + fmt(direct);

  // difference measure against the reference density, as in the comparison
  // between empirical and self-consistent counting
  auto m_diff = [&](Complex z) {
    return m_emp(z) - vde::msc(HalfPlanePoint(z.real(), z.imag()));
  };
  const double diff_counted = locallaw::hs_count(m_diff, window);
  const double diff_direct = direct - oracles::semicircle_integral(
                                          [&](double x) { return window.f(x); }, -2.0, 2.0);
  if (std::abs(diff_counted - diff_direct) > 2e-3)
    return "difference count " + fmt(diff_counted) + " vs " + fmt(diff_direct);
  return std::nullopt;
}

std::optional<std::string> criterion13() {
  const int n = 200, seeds = 20;
  const auto d = semicircle_curve();
  const auto spec = ensembles::EnsembleSpec::make_wigner(n, ensembles::Symmetry::complex_hermitian);
  std::vector<std::vector<double>> g0(seeds), g1(seeds);
  parallel_for(seeds, g_threads, [&](int k) {
    const auto eg = linalg::eigh(ensembles::sample_one(spec, 3000 + k, 0), false);
    dbm::DbmState st{eg.evals, 0.0, 2};
    g0[k] = dbm::normalized_gaps(st.lambdas, d, {-1.0, 1.0}).gaps;
    const auto out = dbm::dbm_simulate(st, 0.5, 4e-5, 9000 + k);
    g1[k] = dbm::normalized_gaps(out.lambdas, d, {-1.0, 1.0}).gaps;
  });
  std::vector<double> pooled0, pooled1;
  for (int k = 0; k < seeds; ++k) {
    pooled0.insert(pooled0.end(), g0[k].begin(), g0[k].end());
    pooled1.insert(pooled1.end(), g1[k].begin(), g1[k].end());
  }
  if (pooled0.size() < 2000 || pooled1.size() < 2000)
    return "pooled gap counts too small: " + std::to_string(pooled0.size());
  const double ks = stats::ks_two_sample(pooled0, pooled1);
  std::printf("       (info) stationarity KS = %.4f over %zu/%zu gaps\n", ks, pooled0.size(),
              pooled1.size());
  if (ks > 0.06) return "gap-law KS between t=0 and t=0.5 is " + fmt(ks) + " > 0.06";
  return std::nullopt;
}

std::optional<std::string> criterion14() {
  const int n = 400;
  const auto d = semicircle_curve();
  // (a) lattice-entry Wigner in the hermitian class vs the Gaussian ensemble
  const int mats = 17;
  const auto rad = ensembles::EnsembleSpec::make_wigner(n, ensembles::Symmetry::complex_hermitian,
                                                        ensembles::EntryLaw::rademacher);
  const auto gue = ensembles::EnsembleSpec::make_wigner(n, ensembles::Symmetry::complex_hermitian);
  std::vector<std::vector<double>> gr(mats), gg(mats);
  parallel_for(mats, g_threads, [&](int k) {
    const auto er = linalg::eigh(ensembles::sample_one(rad, 5000 + k, 0), false);
    gr[k] = dbm::normalized_gaps(er.evals, d, {-1.0, 1.0}).gaps;
    const auto egm = linalg::eigh(ensembles::sample_one(gue, 6000 + k, 0), false);
    gg[k] = dbm::normalized_gaps(egm.evals, d, {-1.0, 1.0}).gaps;
  });
  std::vector<double> pr, pg;
  for (int k = 0; k < mats; ++k) {
    pr.insert(pr.end(), gr[k].begin(), gr[k].end());
    pg.insert(pg.end(), gg[k].begin(), gg[k].end());
  }
  if (pr.size() < 4000 || pg.size() < 4000)
    return "pooled gaps " + std::to_string(pr.size()) + " below 4000";
  const double ks = stats::ks_two_sample(pr, pg);
  std::printf("       (info) universality KS = %.4f over %zu/%zu gaps\n", ks, pr.size(),
              pg.size());
  if (ks > 0.06) return "gap-law KS " + fmt(ks) + " > 0.06";

  // (b) pair correlation around E = 0 against 1 - S(alpha)^2
  const int samples = 500;
  std::vector<VectorXd> spectra(samples);
  parallel_for(samples, g_threads, [&](int k) {
    spectra[k] = linalg::eigh(ensembles::sample_one(gue, 7000 + k, 0), false).evals;
  });
  const auto curve = dbm::two_point_estimate(spectra, d, 0.0, 16);
  double worst = 0.0;
  for (std::size_t b = 0; b < curve.alpha_centers.size(); ++b)
    worst = std::max(worst, std::abs(curve.estimate[b] - curve.reference[b]));
  std::printf("       (info) two-point max bin deviation = %.4f\n", worst);
  if (worst > 0.1) return "two-point deviation " + fmt(worst) + " > 0.1";
  return std::nullopt;
}

// ---- criterion 15: CLI determinism --------------------------------------

std::string g_cli_path;

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli_path + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

std::optional<std::string> compare_files(const fs::path& a, const fs::path& b) {
  const std::string ta = io::read_text(a);
  const std::string tb = io::read_text(b);
  if (ta != tb) return a.filename().string() + " differs between thread counts";
  return std::nullopt;
}

std::optional<std::string> criterion15() {
  if (g_cli_path.empty()) return "CLI binary path not supplied";
  const fs::path work = fs::temp_directory_path() / "dysonlab_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  // density runs at two thread counts
  {
    nlohmann::json cfg = {{"variance_matrix", VarianceMatrix::wigner(32).to_json()},
                          {"grid", {{"min", -3.0}, {"max", 3.0}, {"points", 101}}},
                          {"eta", 1e-2},
                          {"seed", 7}};
    io::write_text(work / "density.json", cfg.dump());
    for (int th : {1, 2}) {
      const int rc = run_cli("density --config " + (work / "density.json").string() + " --out " +
                             (work / ("d" + std::to_string(th))).string() + " --threads " +
                             std::to_string(th));
      if (rc != 0) return "density run exited with " + std::to_string(rc);
    }
    for (const char* f : {"density.csv", "support.json", "density.svg"})
      if (auto err = compare_files(work / "d1" / f, work / "d2" / f)) return err;
  }
  // local-law study at two thread counts
  {
    nlohmann::json cfg = {
        {"ensemble",
         ensembles::EnsembleSpec::make_wigner(120, ensembles::Symmetry::complex_hermitian)
             .to_json()},
        {"E", 0.0},
        {"n_list", {120}},
        {"eta_list", {0.5, 0.3, 0.15, 0.08}},
        {"seeds", 4},
        {"seed", 11}};
    io::write_text(work / "locallaw.json", cfg.dump());
    for (int th : {1, 2}) {
      const int rc = run_cli("local-law --config " + (work / "locallaw.json").string() +
                             " --out " + (work / ("l" + std::to_string(th))).string() +
                             " --threads " + std::to_string(th));
      if (rc != 0) return "local-law run exited with " + std::to_string(rc);
    }
    for (const char* f : {"scaling.csv", "slopes.json", "scaling.svg"})
      if (auto err = compare_files(work / "l1" / f, work / "l2" / f)) return err;
  }
  // dbm with two parallel paths at two thread counts
  {
    nlohmann::json cfg = {{"n", 40},     {"beta", 2},   {"t_end", 0.02}, {"dt", 1e-4},
                          {"paths", 2},  {"seed", 3},   {"stride", 50},
                          {"window", {-1.0, 1.0}}};
    io::write_text(work / "dbm.json", cfg.dump());
    for (int th : {1, 2}) {
      const int rc = run_cli("dbm --config " + (work / "dbm.json").string() + " --out " +
                             (work / ("b" + std::to_string(th))).string() + " --threads " +
                             std::to_string(th));
      if (rc != 0) return "dbm run exited with " + std::to_string(rc);
    }
    for (const char* f : {"trajectory.csv", "gaps.csv", "gap_hist.csv"})
      if (auto err = compare_files(work / "b1" / f, work / "b2" / f)) return err;
  }
  // solve: the isotropic matrix equation at z = i has the scalar solution
  {
    nlohmann::json cfg = {{"target", "mde"},
                          {"self_energy", mde::SelfEnergySpec::isotropic(8).to_json()},
                          {"z", {{"re", 0.0}, {"im", 1.0}}}};
    io::write_text(work / "solve.json", cfg.dump());
    const int rc = run_cli("solve --config " + (work / "solve.json").string() + " --out " +
                           (work / "s1").string());
    if (rc != 0) return "solve run exited with " + std::to_string(rc);
    const auto sol = nlohmann::json::parse(io::read_text(work / "s1" / "solution.json"));
    const auto m = sol["M"].get<std::vector<double>>();
    const double expect = 0.6180339887498949;
    for (int i = 0; i < 8; ++i) {
      const double re = m[2 * (i * 8 + i)];
      const double im = m[2 * (i * 8 + i) + 1];
      if (std::abs(re) > 1e-9 || std::abs(im - expect) > 1e-9)
        return "solve output diagonal is not the scalar solution";
    }
  }
  // error paths: unknown subcommand and an empty grid are config errors
  if (run_cli("frobnicate") != 2) return "unknown subcommand did not exit 2";
  {
    nlohmann::json cfg = {{"variance_matrix", VarianceMatrix::wigner(4).to_json()},
                          {"grid", {{"min", -1.0}, {"max", 1.0}, {"points", 0}}},
                          {"eta", 1e-2}};
    io::write_text(work / "empty.json", cfg.dump());
    if (run_cli("density --config " + (work / "empty.json").string() + " --out " +
                (work / "e1").string()) != 2)
      return "empty grid did not exit 2";
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];
  g_threads = resolve_threads(0);
  std::printf("acceptance suite: %d threads, kernels backend %s\n", g_threads,
              kernels::backend());

  Harness h;
  h.run(" 1. semicircle reduction of the Wigner-type solver", criterion1);
  h.run(" 2. Catalan moments against quadrature", criterion2);
  h.run(" 3. saturated self-energy norm identity", criterion3);
  h.run(" 4. unconditional sup and l2 bounds", criterion4);
  h.run(" 5. vector-matrix solver consistency (diagonal spec)", criterion5);
  h.run(" 6. polar and saturated-superoperator identities", criterion6);
  h.run(" 7. singularity exponents and support structure", criterion7);
  h.run(" 9. local-law scaling exponents (MC, n=1000)", criterion9);
  h.run(" 8. Ward and error-matrix identities", criterion8);
  h.run("10. bulk eigenvector delocalization (GOE, n=1000)", criterion10);
  h.run("11. eigenvalue rigidity vs quantiles (GUE, n=1000)", criterion11);
  h.run("12. Helffer-Sjostrand counting", criterion12);
  h.run("13. Dyson Brownian motion stationarity", criterion13);
  h.run("14. desk-scale gap universality and pair correlation", criterion14);
  h.run("15. CLI determinism across thread counts", criterion15);

  std::printf("%d/15 criteria passed\n", 15 - h.failures);
  return h.failures;
}
