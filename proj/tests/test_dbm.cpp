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

#include <cmath>

#include "doctest.h"
#include "dysonlab/dbm.hpp"
#include "dysonlab/ensembles.hpp"
#include "dysonlab/errors.hpp"
#include "dysonlab/linalg.hpp"
#include "dysonlab/parallel.hpp"
#include "dysonlab/rng.hpp"
#include "dysonlab/stats.hpp"
#include "dysonlab/vde.hpp"

using namespace dysonlab;
using Eigen::VectorXd;

namespace {

DensityCurve semicircle_curve() {
  std::vector<double> grid;
  for (int k = 0; k <= 1200; ++k) grid.push_back(-3.0 + 6.0 * k / 1200.0);
  return vde::sc_density(VarianceMatrix::wigner(16), grid, 1e-4, false, 2);
}

}  // namespace

TEST_CASE("single particle relaxes to the Ornstein-Uhlenbeck variance") {
  // n=1: no repulsion; stationary variance of d x = sqrt(2/(beta)) dB - x/2 dt
  // is 2/(beta n) / (2 * 1/2) = 1 for beta = 2, n = 1
  const int paths = 4000;
  std::vector<double> finals(paths);
  parallel_for(paths, 2, [&](int p) {
    dbm::DbmState st{VectorXd::Zero(1), 0.0, 2};
    const auto out = dbm::dbm_simulate(st, 8.0, 1e-2, 100 + p);
    finals[p] = out.lambdas(0);
  });
  double var = 0.0;
  for (double v : finals) var += v * v;
  var /= paths;
  CHECK(var == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("repulsion separates a symmetric pair without noise") {
  dbm::DbmState st{(VectorXd(2) << -0.01, 0.01).finished(), 0.0, 2};
  dbm::DbmOpts opts;
  opts.noise_scale = 0.0;
  std::vector<double> gaps;
  opts.observer = [&](const dbm::DbmState& s) { gaps.push_back(s.lambdas(1) - s.lambdas(0)); };
  dbm::dbm_simulate(st, 0.05, 1e-5, 1, opts);
  REQUIRE(gaps.size() > 100);
  for (std::size_t k = 1; k < gaps.size(); ++k) CHECK(gaps[k] >= gaps[k - 1]);
}

TEST_CASE("zero-length run returns the initial state") {
  const VectorXd lam = (VectorXd(3) << -1.0, 0.0, 2.0).finished();
  dbm::DbmState st{lam, 0.0, 1};
  const auto out = dbm::dbm_simulate(st, 0.0, 1e-3, 5);
  CHECK((out.lambdas - lam).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ordering is preserved along a noisy trajectory") {
  const auto spec = ensembles::EnsembleSpec::make_wigner(40, ensembles::Symmetry::complex_hermitian);
  const auto eg = linalg::eigh(ensembles::sample_one(spec, 3, 0), false);
  dbm::DbmState st{eg.evals, 0.0, 2};
  dbm::DbmOpts opts;
  bool ordered = true;
  opts.observer = [&](const dbm::DbmState& s) {
    for (int i = 1; i < 40; ++i)
      if (!(s.lambdas(i) > s.lambdas(i - 1))) ordered = false;
  };
  const auto out = dbm::dbm_simulate(st, 0.05, 1e-4, 7, opts);
  CHECK(ordered);
  CHECK(out.t == doctest::Approx(0.05));
  for (int i = 0; i < 40; ++i) CHECK(std::isfinite(out.lambdas(i)));
}

TEST_CASE("invalid inputs are rejected") {
  dbm::DbmState bad{(VectorXd(2) << 1.0, 0.0).finished(), 0.0, 2};
  CHECK_THROWS_AS(dbm::dbm_simulate(bad, 1.0, 1e-3, 1), InvalidInput);
  dbm::DbmState beta_bad{(VectorXd(2) << 0.0, 1.0).finished(), 0.0, 3};
  CHECK_THROWS_AS(dbm::dbm_simulate(beta_bad, 1.0, 1e-3, 1), InvalidInput);
}

TEST_CASE("normalized gaps") {
  const auto d = semicircle_curve();
  {
    // equally spaced configuration at the local mean spacing: unit gaps
    const int n = 400;
    VectorXd lam(n);
    const double rho0 = d.rho_at(0.0);
    for (int i = 0; i < n; ++i) lam(i) = (i - n / 2) / (n * rho0);
    const auto gs = dbm::normalized_gaps(lam, d, {-0.2, 0.2});
    REQUIRE(!gs.gaps.empty());
    for (double g : gs.gaps) CHECK(g == doctest::Approx(1.0).epsilon(0.02));
  }
  {
    const int n = 400;
    const auto spec =
        ensembles::EnsembleSpec::make_wigner(n, ensembles::Symmetry::complex_hermitian);
    const auto eg = linalg::eigh(ensembles::sample_one(spec, 17, 0), false);
    const auto gs = dbm::normalized_gaps(eg.evals, d, {-1.0, 1.0});
    double mean = 0.0;
    for (double g : gs.gaps) mean += g;
    mean /= static_cast<double>(gs.gaps.size());
    CHECK(mean > 0.9);
    CHECK(mean < 1.1);
    CHECK_THROWS_AS(dbm::normalized_gaps(eg.evals, d, {50.0, 51.0}), EmptyWindow);
  }
}

TEST_CASE("gap cdf distance") {
  dbm::GapSample a, b;
  for (int k = 0; k < 500; ++k) {
    const double g = -std::log(crng::uniform(0xddULL, 0, k, 0));
    a.gaps.push_back(g);
    b.gaps.push_back(g);
  }
  CHECK(dbm::gap_cdf_distance(a, b) == 0.0);
  dbm::GapSample tiny;
  tiny.gaps.assign(10, 1.0);
  CHECK_THROWS_AS(dbm::gap_cdf_distance(a, tiny), TooFewGaps);

  // unit-mean exponential gaps match the Poisson law
  std::vector<double> sample;
  for (int k = 0; k < 2000; ++k) sample.push_back(-std::log(crng::uniform(0xeeULL, 1, k, 0)));
  std::vector<double> refq;
  for (int k = 0; k < 20000; ++k) refq.push_back(-std::log((k + 0.5) / 20000.0));
  CHECK(stats::ks_two_sample(sample, refq) <= 0.05);
}

TEST_CASE("gap law distances separate ensembles") {
  const auto d = semicircle_curve();
  const int n = 200, mats = 17;
  const auto spec = ensembles::EnsembleSpec::make_wigner(n, ensembles::Symmetry::complex_hermitian);
  auto pooled_gaps = [&](std::uint64_t seed_base) {
    std::vector<double> gaps;
    for (int k = 0; k < mats; ++k) {
      const auto eg = linalg::eigh(ensembles::sample_one(spec, seed_base + k, 0), false);
      const auto gs = dbm::normalized_gaps(eg.evals, d, {-1.0, 1.0});
      gaps.insert(gaps.end(), gs.gaps.begin(), gs.gaps.end());
    }
    return gaps;
  };
  // independent batches of the same ensemble sit within the null band
  int null_ok = 0;
  for (int trial = 0; trial < 5; ++trial) {
    dbm::GapSample a{pooled_gaps(100 + 40 * trial), {-1, 1}};
    dbm::GapSample b{pooled_gaps(120 + 40 * trial), {-1, 1}};
    REQUIRE(a.gaps.size() >= 2000);
    if (dbm::gap_cdf_distance(a, b) <= 0.05) ++null_ok;
  }
  CHECK(null_ok >= 4);
  // uncorrelated (exponential) gaps are far from the repulsive law
  dbm::GapSample gue{pooled_gaps(500), {-1, 1}};
  dbm::GapSample poisson;
  poisson.gaps.reserve(2000);
  for (int k = 0; k < 2000; ++k)
    poisson.gaps.push_back(-std::log(crng::uniform(0xffULL, 2, k, 0)));
  CHECK(dbm::gap_cdf_distance(gue, poisson) >= 0.15);
}

TEST_CASE("sine kernel values") {
  CHECK(dbm::sine_kernel(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dbm::sine_kernel(1.0)) < 1e-12);
  CHECK(dbm::sine_kernel(0.5) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("two point estimate input validation") {
  const auto d = semicircle_curve();
  std::vector<VectorXd> few(10, VectorXd::LinSpaced(50, -2.0, 2.0));
  CHECK_THROWS_AS(dbm::two_point_estimate(few, d, 0.0, 16), InvalidInput);
}
