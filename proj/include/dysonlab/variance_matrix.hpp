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
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "json.hpp"

namespace dysonlab {

/// Symmetric nonnegative matrix of entry variances s_ij. Rows summing to one
/// (within 1e-12) are detected and flagged; generalized Wigner reductions key
/// off that flag.
class VarianceMatrix {
 public:
  static VarianceMatrix from_entries(Eigen::MatrixXd entries);
  static VarianceMatrix wigner(int n);
  /// s_ij = block_values(b(i), b(j)) / n with n split into equal block rows.
  static VarianceMatrix block_profile(int n, const Eigen::MatrixXd& block_values);

  static VarianceMatrix from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int n() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  bool is_doubly_stochastic() const { return doubly_stochastic_; }
  const std::optional<std::pair<double, double>>& bounds() const { return bounds_; }

  /// Induced max-norm ||S||_inf (largest row sum); the generating measures
  /// live in [-2 sqrt(||S||_inf), 2 sqrt(||S||_inf)].
  double sup_norm() const;
  double support_radius() const;

 private:
  explicit VarianceMatrix(Eigen::MatrixXd entries);

  Eigen::MatrixXd entries_;
  bool doubly_stochastic_ = false;
  std::optional<std::pair<double, double>> bounds_;
};

/// s_ij = profile(i/n, j/n) / n, symmetrized by averaging profile(x,y) and
/// profile(y,x). Indices are 1-based in the sampling, i = 1..n.
VarianceMatrix profile_to_matrix(const std::function<double(double, double)>& profile, int n);

}  // namespace dysonlab
