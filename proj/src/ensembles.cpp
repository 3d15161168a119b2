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

#include "dysonlab/ensembles.hpp"

#include <cmath>

#include "dysonlab/errors.hpp"
#include "dysonlab/linalg.hpp"
#include "dysonlab/rng.hpp"

namespace dysonlab::ensembles {

namespace {

using Complex = std::complex<double>;

std::pair<double, double> law_draw2(EntryLaw law, std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b, std::uint64_t c) {
  switch (law) {
    case EntryLaw::gaussian:
      return crng::normal2(seed, a, b, c);
    case EntryLaw::rademacher:
      return {crng::rademacher(seed, a, b, 2 * c), crng::rademacher(seed, a, b, 2 * c + 1)};
    case EntryLaw::uniform:
      return {crng::uniform_sym(seed, a, b, 2 * c), crng::uniform_sym(seed, a, b, 2 * c + 1)};
  }
  return {0.0, 0.0};
}

// Flattened entry key for the counter derivation tree.
std::uint64_t entry_key(int n, int i, int j) {
  return static_cast<std::uint64_t>(i) * n + static_cast<std::uint64_t>(j);
}

struct ComponentIndex {
  // real class: (i,j) with i <= j; complex class: re/im per i<j plus diagonal
  int n;
  Symmetry sym;
  int dim() const {
    return sym == Symmetry::real_symmetric ? n * (n + 1) / 2 : n * n;
  }
  int upper(int i, int j) const {  // i <= j
    return i * n - i * (i - 1) / 2 + (j - i);
  }
  int re_of(int i, int j) const { return 2 * (upper(i, j) - (i + 1)); }  // i < j
  int im_of(int i, int j) const { return re_of(i, j) + 1; }
  int diag_of(int i) const { return n * (n - 1) + i; }
};

MatrixXd covariance_from_kappa(const std::vector<double>& kappa, int n, Symmetry sym) {
  auto kap = [&](int i, int j, int k, int l) -> double {
    return kappa[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  };
  ComponentIndex ix{n, sym};
  const int d = ix.dim();
  MatrixXd cov(d, d);
  if (sym == Symmetry::real_symmetric) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = k; l < n; ++l) cov(ix.upper(i, j), ix.upper(k, l)) = kap(i, j, k, l);
  } else {
    // components Re h_ij, Im h_ij (i<j) and the real diagonal; covariances
    // follow from kappa via h = Re + i Im and hermitian symmetry
    cov.setZero();
    auto re_re = [&](int i, int j, int k, int l) {
      return 0.25 * (kap(i, j, k, l) + kap(i, j, l, k) + kap(j, i, k, l) + kap(j, i, l, k));
    };
    auto im_im = [&](int i, int j, int k, int l) {
      return -0.25 * (kap(i, j, k, l) - kap(i, j, l, k) - kap(j, i, k, l) + kap(j, i, l, k));
    };
    auto re_im_defect = [&](int i, int j, int k, int l) {
      return kap(i, j, k, l) - kap(i, j, l, k) + kap(j, i, k, l) - kap(j, i, l, k);
    };
    const double scale = std::max(1e-30, std::abs(kappa[0]));
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          for (int l = k; l < n; ++l) {
            if (std::abs(re_im_defect(i, j, k, l)) > 1e-10 * scale)
              throw InvalidInput(
                  "covariance_factorize: kappa implies a complex re/im covariance");
            if (i < j && k < l) {
              cov(ix.re_of(i, j), ix.re_of(k, l)) = re_re(i, j, k, l);
              cov(ix.im_of(i, j), ix.im_of(k, l)) = im_im(i, j, k, l);
            } else if (i == j && k < l) {
              cov(ix.diag_of(i), ix.re_of(k, l)) = re_re(i, j, k, l);
              cov(ix.re_of(k, l), ix.diag_of(i)) = re_re(i, j, k, l);
            } else if (i < j && k == l) {
              cov(ix.re_of(i, j), ix.diag_of(k)) = re_re(i, j, k, l);
              cov(ix.diag_of(k), ix.re_of(i, j)) = re_re(i, j, k, l);
            } else {
              cov(ix.diag_of(i), ix.diag_of(k)) = kap(i, i, k, k);
            }
          }
        }
      }
    }
  }
  return 0.5 * (cov + cov.transpose());
}

MatrixXcd assemble_from_components(const Eigen::VectorXd& comp, int n, Symmetry sym) {
  ComponentIndex ix{n, sym};
  MatrixXcd h(n, n);
  if (sym == Symmetry::real_symmetric) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        h(i, j) = comp(ix.upper(i, j));
        h(j, i) = h(i, j);
      }
  } else {
    for (int i = 0; i < n; ++i) {
      h(i, i) = comp(ix.diag_of(i));
      for (int j = i + 1; j < n; ++j) {
        h(i, j) = Complex(comp(ix.re_of(i, j)), comp(ix.im_of(i, j)));
        h(j, i) = std::conj(h(i, j));
      }
    }
  }
  return h;
}

MatrixXcd sample_correlated(const CovarianceFactor& factor, std::uint64_t seed,
                            std::uint64_t index) {
  const int d = static_cast<int>(factor.factor.cols());
  Eigen::VectorXd xi(d);
  for (int k = 0; k < d; ++k) xi(k) = crng::normal(seed, index, static_cast<std::uint64_t>(k), 0);
  const Eigen::VectorXd comp = factor.factor * xi;
  return assemble_from_components(comp, factor.n, factor.symmetry);
}

}  // namespace

EnsembleSpec EnsembleSpec::make_wigner(int n, Symmetry sym, EntryLaw law) {
  EnsembleSpec s;
  s.n = n;
  s.symmetry = sym;
  s.kind = Kind::wigner;
  s.entry_law = law;
  return s;
}

EnsembleSpec EnsembleSpec::make_wigner_type(VarianceMatrix vm, Symmetry sym, EntryLaw law) {
  EnsembleSpec s;
  s.n = vm.n();
  s.symmetry = sym;
  s.kind = vm.is_doubly_stochastic() ? Kind::generalized_wigner : Kind::wigner_type;
  s.entry_law = law;
  s.variance_matrix = std::move(vm);
  return s;
}

EnsembleSpec EnsembleSpec::make_correlated(mde::SelfEnergySpec full_spec, Symmetry sym) {
  if (full_spec.kind != mde::SelfEnergySpec::Kind::full)
    throw InvalidInput("make_correlated: a full SelfEnergySpec is required");
  EnsembleSpec s;
  s.n = full_spec.n;
  s.symmetry = sym;
  s.kind = Kind::gaussian_correlated;
  s.entry_law = EntryLaw::gaussian;
  s.correlated_spec = std::move(full_spec);
  return s;
}

EnsembleSpec EnsembleSpec::from_json(const nlohmann::json& j) {
  const std::string sym_s = j.at("symmetry").get<std::string>();
  const Symmetry sym = sym_s == "real_symmetric" ? Symmetry::real_symmetric
                       : sym_s == "complex_hermitian"
                           ? Symmetry::complex_hermitian
                           : throw InvalidInput("EnsembleSpec: unknown symmetry " + sym_s);
  const std::string kind = j.at("kind").get<std::string>();
  EntryLaw law = EntryLaw::gaussian;
  if (j.contains("entry_law")) {
    const std::string law_s = j.at("entry_law").get<std::string>();
    law = law_s == "gaussian"     ? EntryLaw::gaussian
          : law_s == "rademacher" ? EntryLaw::rademacher
          : law_s == "uniform"
              ? EntryLaw::uniform
              : throw InvalidInput("EnsembleSpec: unknown entry_law " + law_s);
  }
  if (kind == "wigner") return make_wigner(j.at("n").get<int>(), sym, law);
  if (kind == "generalized_wigner" || kind == "wigner_type")
    return make_wigner_type(VarianceMatrix::from_json(j.at("variance_matrix")), sym, law);
  if (kind == "gaussian_correlated")
    return make_correlated(mde::SelfEnergySpec::from_json(j.at("correlated_spec")), sym);
  throw InvalidInput("EnsembleSpec: unknown kind " + kind);
}

nlohmann::json EnsembleSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["symmetry"] = symmetry == Symmetry::real_symmetric ? "real_symmetric" : "complex_hermitian";
  switch (kind) {
    case Kind::wigner:
      j["kind"] = "wigner";
      break;
    case Kind::generalized_wigner:
      j["kind"] = "generalized_wigner";
      break;
    case Kind::wigner_type:
      j["kind"] = "wigner_type";
      break;
    case Kind::gaussian_correlated:
      j["kind"] = "gaussian_correlated";
      break;
  }
  switch (entry_law) {
    case EntryLaw::gaussian:
      j["entry_law"] = "gaussian";
      break;
    case EntryLaw::rademacher:
      j["entry_law"] = "rademacher";
      break;
    case EntryLaw::uniform:
      j["entry_law"] = "uniform";
      break;
  }
  if (variance_matrix) j["variance_matrix"] = variance_matrix->to_json();
  if (correlated_spec) j["correlated_spec"] = correlated_spec->to_json();
  return j;
}

VarianceMatrix EnsembleSpec::effective_variances() const {
  if (variance_matrix) return *variance_matrix;
  if (kind == Kind::wigner) return VarianceMatrix::wigner(n);
  throw InvalidInput("effective_variances: no variance matrix for this spec");
}

CovarianceFactor covariance_factorize(const std::vector<double>& kappa, int n, Symmetry sym) {
  if (kappa.size() != static_cast<std::size_t>(n) * n * n * n)
    throw InvalidInput("covariance_factorize: kappa must have n^4 entries");
  const MatrixXd cov = covariance_from_kappa(kappa, n, sym);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  const Eigen::VectorXd vals = eig.eigenvalues();
  const double scale = std::max(std::abs(vals(0)), std::abs(vals(vals.size() - 1)));
  if (vals(0) < -1e-10 * std::max(scale, 1e-30))
    throw InvalidCovariance("covariance_factorize: covariance is not PSD", vals(0));
  Eigen::VectorXd roots = vals;
  for (Eigen::Index k = 0; k < roots.size(); ++k)
    roots(k) = std::sqrt(std::max(roots(k), 0.0));
  CovarianceFactor f;
  f.n = n;
  f.symmetry = sym;
  f.factor = eig.eigenvectors() * roots.asDiagonal();
  return f;
}

MatrixXcd sample_one(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t sample_index) {
  const int n = spec.n;
  if (spec.kind == Kind::gaussian_correlated) {
    const CovarianceFactor factor =
        covariance_factorize(spec.correlated_spec->kappa, n, spec.symmetry);
    return sample_correlated(factor, seed, sample_index);
  }
  const VarianceMatrix s = spec.effective_variances();
  MatrixXcd h(n, n);
  if (spec.symmetry == Symmetry::real_symmetric) {
    for (int i = 0; i < n; ++i) {
      h(i, i) = std::sqrt(2.0 * s.entries()(i, i)) *
                law_draw2(spec.entry_law, seed, sample_index, entry_key(n, i, i), 0).first;
      for (int j = i + 1; j < n; ++j) {
        const double x =
            law_draw2(spec.entry_law, seed, sample_index, entry_key(n, i, j), 0).first;
        h(i, j) = std::sqrt(s.entries()(i, j)) * x;
        h(j, i) = h(i, j);
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      h(i, i) = std::sqrt(s.entries()(i, i)) *
                law_draw2(spec.entry_law, seed, sample_index, entry_key(n, i, i), 0).first;
      for (int j = i + 1; j < n; ++j) {
        const auto [x, y] =
            law_draw2(spec.entry_law, seed, sample_index, entry_key(n, i, j), 0);
        const double sigma = std::sqrt(s.entries()(i, j) / 2.0);
        h(i, j) = Complex(sigma * x, sigma * y);
        h(j, i) = std::conj(h(i, j));
      }
    }
  }
  return h;
}

MatrixXd sample_one_real(const EnsembleSpec& spec, std::uint64_t seed,
                         std::uint64_t sample_index) {
  if (spec.symmetry != Symmetry::real_symmetric)
    throw InvalidInput("sample_one_real: spec is complex hermitian");
  return sample_one(spec, seed, sample_index).real();
}

SampleBatch sample(const EnsembleSpec& spec, std::uint64_t seed, int count) {
  SampleBatch batch{spec, seed, {}};
  batch.matrices.reserve(count);
  if (spec.kind == Kind::gaussian_correlated) {
    const CovarianceFactor factor =
        covariance_factorize(spec.correlated_spec->kappa, spec.n, spec.symmetry);
    for (int k = 0; k < count; ++k)
      batch.matrices.push_back(sample_correlated(factor, seed, static_cast<std::uint64_t>(k)));
  } else {
    for (int k = 0; k < count; ++k)
      batch.matrices.push_back(sample_one(spec, seed, static_cast<std::uint64_t>(k)));
  }
  return batch;
}

SelfEnergyEstimate empirical_self_energy(const EnsembleSpec& spec, const MatrixXcd& r, int count,
                                         std::uint64_t seed) {
  const int n = spec.n;
  if (count < 100) throw InvalidInput("empirical_self_energy: count >= 100 required");
  if (r.rows() != n || r.cols() != n)
    throw InvalidInput("empirical_self_energy: dimension mismatch");
  MatrixXcd mean = MatrixXcd::Zero(n, n);
  MatrixXd sumsq = MatrixXd::Zero(n, n);
  std::optional<CovarianceFactor> factor;
  if (spec.kind == Kind::gaussian_correlated)
    factor = covariance_factorize(spec.correlated_spec->kappa, n, spec.symmetry);
  for (int k = 0; k < count; ++k) {
    const MatrixXcd h = factor ? sample_correlated(*factor, seed, static_cast<std::uint64_t>(k))
                               : sample_one(spec, seed, static_cast<std::uint64_t>(k));
    const MatrixXcd term = h * r * h;
    mean += term;
    sumsq += term.cwiseAbs2();
  }
  mean /= static_cast<double>(count);
  double sem_max = 0.0;
  if (count > 1) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double var =
            std::max(0.0, (sumsq(i, j) - count * std::norm(mean(i, j))) / (count - 1.0));
        sem_max = std::max(sem_max, std::sqrt(var / count));
      }
  }
  return SelfEnergyEstimate{std::move(mean), sem_max};
}

}  // namespace dysonlab::ensembles
