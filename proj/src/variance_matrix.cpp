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

#include "dysonlab/variance_matrix.hpp"

#include <cmath>

#include "dysonlab/errors.hpp"

namespace dysonlab {

VarianceMatrix::VarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  const int n = static_cast<int>(entries_.rows());
  if (n <= 0 || entries_.cols() != n) throw InvalidInput("VarianceMatrix: square matrix required");
  double max_asym = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      max_asym = std::max(max_asym, std::abs(entries_(i, j) - entries_(j, i)));
      if (entries_(i, j) < 0.0 || entries_(j, i) < 0.0)
        throw InvalidInput("VarianceMatrix: negative entry");
    }
  }
  if (max_asym > 1e-12 * std::max(1.0, entries_.cwiseAbs().maxCoeff()))
    throw InvalidInput("VarianceMatrix: matrix is not symmetric");
  entries_ = (0.5 * (entries_ + entries_.transpose())).eval();

  doubly_stochastic_ = true;
  for (int i = 0; i < n && doubly_stochastic_; ++i)
    if (std::abs(entries_.row(i).sum() - 1.0) > 1e-12) doubly_stochastic_ = false;

  const double lo = entries_.minCoeff();
  const double hi = entries_.maxCoeff();
  if (lo > 0.0) bounds_ = std::make_pair(lo * n, hi * n);
}

VarianceMatrix VarianceMatrix::from_entries(Eigen::MatrixXd entries) {
  return VarianceMatrix(std::move(entries));
}

VarianceMatrix VarianceMatrix::wigner(int n) {
  if (n <= 0) throw InvalidInput("wigner: n must be positive");
  return VarianceMatrix(Eigen::MatrixXd::Constant(n, n, 1.0 / n));
}

VarianceMatrix VarianceMatrix::block_profile(int n, const Eigen::MatrixXd& block_values) {
  const int b = static_cast<int>(block_values.rows());
  if (block_values.cols() != b) throw InvalidInput("block_profile: block matrix must be square");
  if (n % b != 0) throw InvalidInput("block_profile: n must be divisible by block_rows");
  Eigen::MatrixXd s(n, n);
  const int w = n / b;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = block_values(i / w, j / w) / n;
  return VarianceMatrix(std::move(s));
}

VarianceMatrix VarianceMatrix::from_json(const nlohmann::json& j) {
  if (j.contains("profile")) {
    const auto& p = j.at("profile");
    if (p.at("kind").get<std::string>() != "blocks")
      throw InvalidInput("VarianceMatrix: unknown profile kind");
    const int b = p.at("block_rows").get<int>();
    const auto vals = p.at("values").get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != b * b)
      throw InvalidInput("VarianceMatrix: profile values must have block_rows^2 entries");
    Eigen::MatrixXd bv(b, b);
    for (int r = 0; r < b; ++r)
      for (int c = 0; c < b; ++c) bv(r, c) = vals[r * b + c];
    const int n = j.at("n").get<int>();
    return block_profile(n, bv);
  }
  const int n = j.at("n").get<int>();
  const auto vals = j.at("entries").get<std::vector<double>>();
  if (static_cast<int>(vals.size()) != n * n)
    throw InvalidInput("VarianceMatrix: entries must have n^2 values");
  Eigen::MatrixXd s(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) s(r, c) = vals[r * n + c];  // row-major on the wire
  return VarianceMatrix(std::move(s));
}

nlohmann::json VarianceMatrix::to_json() const {
  const int n = this->n();
  std::vector<double> vals(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) vals[static_cast<std::size_t>(r) * n + c] = entries_(r, c);
  return nlohmann::json{{"n", n}, {"entries", vals}};
}

double VarianceMatrix::sup_norm() const {
  double m = 0.0;
  for (int i = 0; i < n(); ++i) m = std::max(m, entries_.row(i).cwiseAbs().sum());
  return m;
}

double VarianceMatrix::support_radius() const { return 2.0 * std::sqrt(sup_norm()); }

VarianceMatrix profile_to_matrix(const std::function<double(double, double)>& profile, int n) {
  if (n <= 0) throw InvalidInput("profile_to_matrix: n must be positive");
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double x = static_cast<double>(i + 1) / n;
      const double y = static_cast<double>(j + 1) / n;
      const double v = 0.5 * (profile(x, y) + profile(y, x));
      if (v < 0.0 || !std::isfinite(v)) throw NegativeProfile("profile_to_matrix: profile < 0");
      s(i, j) = s(j, i) = v / n;
    }
  }
  return VarianceMatrix::from_entries(std::move(s));
}

}  // namespace dysonlab
