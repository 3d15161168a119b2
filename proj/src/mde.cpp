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

#include "dysonlab/mde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dysonlab/errors.hpp"
#include "dysonlab/linalg.hpp"
#include "dysonlab/parallel.hpp"

namespace dysonlab::mde {

namespace {

constexpr int kFullKindCap = 64;
constexpr int kNewtonCap = 48;  // kron solves beyond this are not worth it

MatrixXcd hermitian_part(const MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

MatrixXcd imag_part(const MatrixXcd& m) {
  return (m - m.adjoint()) / Complex(0.0, 2.0);
}

double min_eig_hermitian(const MatrixXcd& h) {
  const auto eg = linalg::eigh(h, /*want_vectors=*/false);
  return eg.evals(0);
}

// Hermitian matrix function through the eigendecomposition, eigenvalues
// clipped at `clip` before applying fn.
MatrixXcd hermitian_fn(const MatrixXcd& h, double clip,
                       const std::function<double(double)>& fn) {
  const auto eg = linalg::eigh(h, /*want_vectors=*/true);
  Eigen::VectorXd vals = eg.evals;
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = fn(std::max(vals(i), clip));
  return eg.vecs * vals.asDiagonal() * eg.vecs.adjoint();
}

}  // namespace

SelfEnergySpec SelfEnergySpec::isotropic(int n) {
  if (n <= 0) throw InvalidInput("SelfEnergySpec: n must be positive");
  SelfEnergySpec s;
  s.n = n;
  s.kind = Kind::isotropic;
  s.flatness_bounds = std::make_pair(1.0, 1.0);
  return s;
}

SelfEnergySpec SelfEnergySpec::diagonal(VarianceMatrix vm) {
  SelfEnergySpec s;
  s.n = vm.n();
  s.kind = Kind::diagonal;
  if (vm.bounds()) s.flatness_bounds = std::make_pair(vm.bounds()->first, vm.bounds()->second);
  s.variance_matrix = std::move(vm);
  return s;
}

SelfEnergySpec SelfEnergySpec::full(int n, std::vector<double> kappa) {
  if (n <= 0) throw InvalidInput("SelfEnergySpec: n must be positive");
  if (n > kFullKindCap) throw UnsupportedKind("SelfEnergySpec: full kind capped at n <= 64");
  if (kappa.size() != static_cast<std::size_t>(n) * n * n * n)
    throw InvalidInput("SelfEnergySpec: kappa must have n^4 entries");
  SelfEnergySpec s;
  s.n = n;
  s.kind = Kind::full;
  s.kappa = std::move(kappa);
  return s;
}

SelfEnergySpec SelfEnergySpec::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  SelfEnergySpec s;
  if (kind == "isotropic") {
    s = isotropic(n);
  } else if (kind == "diagonal") {
    s = diagonal(VarianceMatrix::from_json(j.at("variance_matrix")));
    if (s.n != n) throw InvalidInput("SelfEnergySpec: n disagrees with variance matrix");
  } else if (kind == "full") {
    s = full(n, j.at("kappa").get<std::vector<double>>());
  } else {
    throw InvalidInput("SelfEnergySpec: unknown kind " + kind);
  }
  if (j.contains("flatness_bounds")) {
    const auto b = j.at("flatness_bounds").get<std::vector<double>>();
    if (b.size() != 2) throw InvalidInput("SelfEnergySpec: flatness_bounds must be [c, C]");
    s.flatness_bounds = std::make_pair(b[0], b[1]);
  }
  return s;
}

nlohmann::json SelfEnergySpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  switch (kind) {
    case Kind::isotropic:
      j["kind"] = "isotropic";
      break;
    case Kind::diagonal:
      j["kind"] = "diagonal";
      j["variance_matrix"] = variance_matrix->to_json();
      break;
    case Kind::full:
      j["kind"] = "full";
      j["kappa"] = kappa;
      break;
  }
  if (flatness_bounds)
    j["flatness_bounds"] = std::vector<double>{flatness_bounds->first, flatness_bounds->second};
  return j;
}

MatrixXcd apply_self_energy(const SelfEnergySpec& spec, const MatrixXcd& r) {
  const int n = spec.n;
  if (r.rows() != n || r.cols() != n) throw InvalidInput("apply_self_energy: dimension mismatch");
  switch (spec.kind) {
    case SelfEnergySpec::Kind::isotropic: {
      const Complex tr = r.trace() / static_cast<double>(n);
      return tr * MatrixXcd::Identity(n, n);
    }
    case SelfEnergySpec::Kind::diagonal: {
      Eigen::VectorXcd diag = r.diagonal();
      Eigen::VectorXcd sd = spec.variance_matrix->entries().cast<Complex>() * diag;
      MatrixXcd out = MatrixXcd::Zero(n, n);
      out.diagonal() = sd;
      return out;
    }
    case SelfEnergySpec::Kind::full: {
      if (n > kFullKindCap) throw UnsupportedKind("apply_self_energy: full kind needs n <= 64");
      MatrixXcd out(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Complex acc(0.0, 0.0);
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) acc += spec.kappa_at(i, a, b, j) * r(a, b);
          out(i, j) = acc;
        }
      }
      return out;
    }
  }
  throw InvalidInput("apply_self_energy: unreachable");
}

MatrixXcd materialize_self_energy(const SelfEnergySpec& spec) {
  const int n = spec.n;
  const int nn = n * n;
  MatrixXcd mat = MatrixXcd::Zero(nn, nn);
  // column-major vec: entry (i,j) sits at index i + n*j
  switch (spec.kind) {
    case SelfEnergySpec::Kind::isotropic: {
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a) mat(i + n * i, a + n * a) = 1.0 / n;
      break;
    }
    case SelfEnergySpec::Kind::diagonal: {
      const auto& s = spec.variance_matrix->entries();
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a) mat(i + n * i, a + n * a) = s(i, a);
      break;
    }
    case SelfEnergySpec::Kind::full: {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) mat(i + n * j, a + n * b) = spec.kappa_at(i, a, b, j);
      break;
    }
  }
  return mat;
}

namespace {

struct MdeWork {
  const SelfEnergySpec* spec;
  const MatrixXcd* a_source;
  // Newton support (n <= kNewtonCap): materialized self-energy in vec basis
  std::optional<MatrixXcd> mat_s;
};

double frobenius_residual(const SelfEnergySpec& spec, const MatrixXcd& a, Complex z,
                          const MatrixXcd& m, MatrixXcd* defect_out = nullptr) {
  const int n = spec.n;
  MatrixXcd defect = MatrixXcd::Identity(n, n) +
                     (z * MatrixXcd::Identity(n, n) - a + apply_self_energy(spec, m)) * m;
  const double f = defect.norm();
  if (defect_out) *defect_out = std::move(defect);
  return f;
}

// Fixed-point map M -> -(z - A + S[M])^{-1}.
MatrixXcd phi_map(const SelfEnergySpec& spec, const MatrixXcd& a, Complex z, const MatrixXcd& m) {
  const int n = spec.n;
  const MatrixXcd denom = z * MatrixXcd::Identity(n, n) - a + apply_self_energy(spec, m);
  return -denom.partialPivLu().inverse();
}

// Newton correction: solve (1 - C_M S)[Delta] = M * defect in the vec basis.
MatrixXcd newton_correction(MdeWork& work, const MatrixXcd& m, const MatrixXcd& defect) {
  const int n = static_cast<int>(m.rows());
  const int nn = n * n;
  if (!work.mat_s) work.mat_s = materialize_self_energy(*work.spec);
  MatrixXcd stab =
      MatrixXcd::Identity(nn, nn) - linalg::gemm(linalg::kron(m.transpose(), m), *work.mat_s);
  const MatrixXcd rhs_mat = m * defect;
  Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(rhs_mat.data(), nn);
  Eigen::VectorXcd delta = linalg::solve_lu(stab, rhs);
  return Eigen::Map<const MatrixXcd>(delta.data(), n, n);
}

void solve_mde_at(MdeWork& work, Complex z, MatrixXcd& m, double tol, const MdeOpts& opts) {
  const SelfEnergySpec& spec = *work.spec;
  const MatrixXcd& a = *work.a_source;
  const int n = spec.n;
  const bool newton_ok = n <= kNewtonCap;

  MatrixXcd defect;
  double res = frobenius_residual(spec, a, z, m, &defect);
  double alpha = 1.0;
  double prev_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    if (res <= tol) return;

    // the n^2 x n^2 Newton solve is worth it only once the damped iteration
    // has stopped making progress
    const bool stalled = res < 1e-2 && res > 0.97 * prev_res;
    if (newton_ok && stalled) {
      MatrixXcd delta = newton_correction(work, m, defect);
      double step = 1.0;
      bool accepted = false;
      for (int back = 0; back < 30 && !accepted; ++back, step *= 0.5) {
        MatrixXcd trial = m + step * delta;
        if (min_eig_hermitian(imag_part(trial)) <= 0.0) continue;
        MatrixXcd trial_defect;
        const double r_trial = frobenius_residual(spec, a, z, trial, &trial_defect);
        if (r_trial < res) {
          m = std::move(trial);
          defect = std::move(trial_defect);
          res = r_trial;
          accepted = true;
        }
      }
      if (accepted) {
        prev_res = std::numeric_limits<double>::infinity();
        continue;
      }
    }

    bool stepped = false;
    while (!stepped) {
      const MatrixXcd phi = phi_map(spec, a, z, m);
      MatrixXcd trial = (1.0 - alpha) * m + alpha * phi;
      const bool positive = min_eig_hermitian(imag_part(trial)) > 0.0;
      MatrixXcd trial_defect;
      const double r_trial =
          positive ? frobenius_residual(spec, a, z, trial, &trial_defect)
                   : std::numeric_limits<double>::infinity();
      if (positive && (r_trial < res || alpha < 1e-5)) {
        m = std::move(trial);
        defect = std::move(trial_defect);
        prev_res = res;
        res = r_trial;
        alpha = std::min(1.0, 1.5 * alpha);
        stepped = true;
      } else {
        alpha *= 0.5;
        if (alpha < 1e-8) {
          if (!positive)
            throw LosesPositivity("solve_mde: cannot keep Im M > 0 at any step size");
          throw NonConvergence("solve_mde: damping floor reached", res);
        }
      }
    }
  }
  if (res > tol) throw NonConvergence("solve_mde: iteration budget exhausted", res);
}

}  // namespace

SolutionMatrix solve_mde(const SelfEnergySpec& spec, const MatrixXcd& a_source, HalfPlanePoint z,
                         const MdeOpts& opts) {
  const int n = spec.n;
  if (a_source.rows() != n || a_source.cols() != n)
    throw InvalidInput("solve_mde: A dimension mismatch");
  if ((a_source - a_source.adjoint()).norm() > 1e-12 * std::max(1.0, a_source.norm()))
    throw InvalidInput("solve_mde: A must be hermitian");

  MdeWork work{&spec, &a_source, std::nullopt};

  std::vector<double> etas;
  for (double eta = std::max(opts.eta_start, z.im()); eta > z.im(); eta *= opts.eta_factor)
    etas.push_back(eta);
  etas.push_back(z.im());

  MatrixXcd m = (-1.0 / Complex(z.re(), etas.front())) * MatrixXcd::Identity(n, n);
  // intermediate levels only seed the warm start
  const double warm_tol = std::max(opts.tol, 1e-6);
  for (std::size_t k = 0; k + 1 < etas.size(); ++k)
    solve_mde_at(work, Complex(z.re(), etas[k]), m, warm_tol, opts);
  solve_mde_at(work, Complex(z.re(), etas.back()), m, opts.tol, opts);

  // Frobenius controls the iteration; report the operator-norm defect.
  MatrixXcd defect;
  frobenius_residual(spec, a_source, z.z(), m, &defect);
  const double res2 = linalg::operator_norm_2(defect);
  return SolutionMatrix{z, std::move(m), res2};
}

DensityCurve mde_density(const SelfEnergySpec& spec, const MatrixXcd& a_source,
                         const std::vector<double>& grid, double eta, int threads,
                         const MdeOpts& opts) {
  if (!(eta > 0.0)) throw InvalidInput("mde_density: eta must be > 0");
  const int npts = static_cast<int>(grid.size());
  DensityCurve d;
  d.grid = grid;
  d.rho.assign(npts, std::numeric_limits<double>::quiet_NaN());
  d.valid.assign(npts, 0);
  d.eta_used = eta;
  parallel_for(npts, threads, [&](int k) {
    try {
      const SolutionMatrix sol = solve_mde(spec, a_source, HalfPlanePoint(grid[k], eta), opts);
      d.rho[k] = imag_part(sol.M).real().trace() / (spec.n * M_PI);
      d.valid[k] = 1;
    } catch (const NonConvergence&) {
    } catch (const LosesPositivity&) {
    }
  });
  return d;
}

PolarParts polar_decompose(const SolutionMatrix& sol) {
  const int n = static_cast<int>(sol.M.rows());
  PolarParts p;
  p.B = imag_part(sol.M);
  p.A_part = hermitian_part(sol.M);
  if (min_eig_hermitian(p.B) < 1e-12)
    throw IllConditioned("polar_decompose: Im M has an eigenvalue below 1e-12");

  const MatrixXcd b_sqrt = hermitian_fn(p.B, 1e-14, [](double x) { return std::sqrt(x); });
  const MatrixXcd b_isqrt =
      hermitian_fn(p.B, 1e-14, [](double x) { return 1.0 / std::sqrt(x); });
  const MatrixXcd k = hermitian_part(b_isqrt * p.A_part * b_isqrt);

  const auto eg = linalg::eigh(k, /*want_vectors=*/true);
  Eigen::VectorXd w_vals(n);
  Eigen::VectorXcd y_vals(n);
  for (int i = 0; i < n; ++i) {
    const double kap = eg.evals(i);
    const double root = std::sqrt(1.0 + kap * kap);
    w_vals(i) = std::sqrt(root);  // (1 + kap^2)^{1/4}
    y_vals(i) = Complex(kap, 1.0) / root;
  }
  p.W = eg.vecs * w_vals.cast<Complex>().asDiagonal() * eg.vecs.adjoint();
  p.Y = eg.vecs * y_vals.asDiagonal() * eg.vecs.adjoint();
  p.Q = b_sqrt * p.W;
  return p;
}

SuperOperator saturated_superop(const SelfEnergySpec& spec, const PolarParts& parts) {
  SuperOperator op;
  op.n = spec.n;
  const MatrixXcd q = parts.Q;
  op.apply = [spec, q](const MatrixXcd& x) -> MatrixXcd {
    return q.adjoint() * apply_self_energy(spec, q * x * q.adjoint()) * q;
  };
  if (spec.n <= kFullKindCap) {
    const MatrixXcd kq = linalg::kron(q.conjugate(), q);  // vec(Q X Q*)
    op.materialized = kq.adjoint() * materialize_self_energy(spec) * kq;
  }
  return op;
}

SuperopSpectrum superop_norm_and_gap(const SuperOperator& op) {
  if (!op.materialized)
    throw UnsupportedKind("superop_norm_and_gap: superoperator is not materialized");
  const MatrixXcd& mat = *op.materialized;
  const MatrixXcd herm = 0.5 * (mat + mat.adjoint());
  if ((mat - herm).norm() > 1e-8 * std::max(1.0, mat.norm()))
    throw InvalidInput("superop_norm_and_gap: operator is not HS self-adjoint");
  const auto eg = linalg::eigh(herm, /*want_vectors=*/true);
  const int nn = static_cast<int>(eg.evals.size());
  int top = 0;
  double best = -1.0, second = 0.0;
  for (int i = 0; i < nn; ++i) {
    const double a = std::abs(eg.evals(i));
    if (a > best) {
      second = best;
      best = a;
      top = i;
    } else if (a > second) {
      second = a;
    }
  }
  SuperopSpectrum out;
  out.norm = best;
  out.gap = best - std::max(second, 0.0);
  Eigen::VectorXcd v = eg.vecs.col(top);
  MatrixXcd f = Eigen::Map<const MatrixXcd>(v.data(), op.n, op.n);
  const Complex tr = f.trace();
  if (std::abs(tr) > 1e-12) f *= std::conj(tr) / std::abs(tr);  // phase-fix: tr F >= 0
  out.eigenmatrix = f / f.norm();
  return out;
}

double stability_inverse_norm_mde(const SelfEnergySpec& spec, const SolutionMatrix& sol,
                                  StabilityDiagnostics* diag) {
  const int n = spec.n;
  if (n > kFullKindCap)
    throw UnsupportedKind("stability_inverse_norm_mde: materialization capped at n <= 64");
  const int nn = n * n;
  const MatrixXcd mat_s = materialize_self_energy(spec);
  const MatrixXcd stab =
      MatrixXcd::Identity(nn, nn) - linalg::kron(sol.M.transpose(), sol.M) * mat_s;
  const double smin = linalg::smallest_singular_value(stab);
  if (smin < 1e-14) throw SingularStability("stability_inverse_norm_mde: singular");
  const double direct = 1.0 / smin;

  if (diag) {
    const PolarParts parts = polar_decompose(sol);
    const SuperOperator f = saturated_superop(spec, parts);
    const MatrixXcd cy = linalg::kron(parts.Y.transpose(), parts.Y);
    const MatrixXcd inner = MatrixXcd::Identity(nn, nn) - cy * (*f.materialized);
    const double inner_smin = linalg::smallest_singular_value(inner);
    const double kq_norm = linalg::operator_norm_2(parts.Q);
    const double kq_inv_norm = linalg::operator_norm_2(parts.Q.partialPivLu().inverse());
    diag->direct = direct;
    diag->factored_bound =
        (kq_norm * kq_norm) * (1.0 / inner_smin) * (kq_inv_norm * kq_inv_norm);
  }
  return direct;
}

}  // namespace dysonlab::mde
