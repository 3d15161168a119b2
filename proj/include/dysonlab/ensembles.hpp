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
#include <cstdint>
#include <optional>
#include <vector>

#include "dysonlab/mde.hpp"
#include "dysonlab/variance_matrix.hpp"
#include "json.hpp"

namespace dysonlab::ensembles {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

enum class Symmetry { real_symmetric, complex_hermitian };
enum class Kind { wigner, generalized_wigner, wigner_type, gaussian_correlated };
enum class EntryLaw { gaussian, rademacher, uniform };

/// Hermitian random-matrix model. Entry conventions:
///  - off-diagonal variance E|h_ij|^2 = s_ij; the complex class splits it as
///    independent re/im parts of variance s_ij/2 each (so E h_ij^2 = 0)
///  - diagonal variance E h_ii^2 = (2/beta) s_ii, i.e. doubled for the real
///    class, matching the Gaussian ensemble conventions
///  - gaussian_correlated is Gaussian only and driven by a full
///    SelfEnergySpec kappa
struct EnsembleSpec {
  int n = 0;
  Symmetry symmetry = Symmetry::real_symmetric;
  Kind kind = Kind::wigner;
  EntryLaw entry_law = EntryLaw::gaussian;
  std::optional<VarianceMatrix> variance_matrix;        // generalized_wigner / wigner_type
  std::optional<mde::SelfEnergySpec> correlated_spec;   // gaussian_correlated (full kind)

  static EnsembleSpec make_wigner(int n, Symmetry sym, EntryLaw law = EntryLaw::gaussian);
  static EnsembleSpec make_wigner_type(VarianceMatrix s, Symmetry sym,
                                       EntryLaw law = EntryLaw::gaussian);
  static EnsembleSpec make_correlated(mde::SelfEnergySpec full_spec, Symmetry sym);

  static EnsembleSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Variance matrix actually in force (all-ones/n for the wigner kind).
  VarianceMatrix effective_variances() const;
  int beta() const { return symmetry == Symmetry::real_symmetric ? 1 : 2; }
};

struct SampleBatch {
  EnsembleSpec spec;
  std::uint64_t seed;
  std::vector<MatrixXcd> matrices;
};

/// One hermitian draw; deterministic in (spec, seed, sample_index) via
/// counter-based per-entry derivation, independent of threading.
MatrixXcd sample_one(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t sample_index);

/// Real-class fast path (throws if the spec is complex hermitian).
MatrixXd sample_one_real(const EnsembleSpec& spec, std::uint64_t seed,
                         std::uint64_t sample_index);

SampleBatch sample(const EnsembleSpec& spec, std::uint64_t seed, int count);

struct SelfEnergyEstimate {
  MatrixXcd estimate;
  double stderr_max;  // largest per-entry standard error of the mean
};

/// Monte-Carlo estimate of S[R] = E[H R H].
SelfEnergyEstimate empirical_self_energy(const EnsembleSpec& spec, const MatrixXcd& r, int count,
                                         std::uint64_t seed);

/// Square-root factor of the covariance of the independent hermitian
/// components (upper triangle incl. diagonal; re/im split for the complex
/// class) extracted from a full kappa tensor. Sampling is factor * iid
/// standard normals followed by hermitian symmetrization.
struct CovarianceFactor {
  int n = 0;
  Symmetry symmetry = Symmetry::real_symmetric;
  MatrixXd factor;  // d x d, d = #independent real components
};

CovarianceFactor covariance_factorize(const std::vector<double>& kappa, int n, Symmetry sym);

}  // namespace dysonlab::ensembles
