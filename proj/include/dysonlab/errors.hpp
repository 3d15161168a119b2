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

#include <stdexcept>
#include <string>

namespace dysonlab {

struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

struct NonConvergence : std::runtime_error {
  double last_residual;
  NonConvergence(const std::string& what, double res)
      : std::runtime_error(what + " (last residual " + std::to_string(res) + ")"),
        last_residual(res) {}
};

struct DegenerateDenominator : std::runtime_error {
  explicit DegenerateDenominator(const std::string& what) : std::runtime_error(what) {}
};

struct SingularStability : std::runtime_error {
  explicit SingularStability(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientSignal : std::runtime_error {
  explicit InsufficientSignal(const std::string& what) : std::runtime_error(what) {}
};

struct NegativeProfile : std::runtime_error {
  explicit NegativeProfile(const std::string& what) : std::runtime_error(what) {}
};

struct MassDeficit : std::runtime_error {
  explicit MassDeficit(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedKind : std::runtime_error {
  explicit UnsupportedKind(const std::string& what) : std::runtime_error(what) {}
};

struct LosesPositivity : std::runtime_error {
  explicit LosesPositivity(const std::string& what) : std::runtime_error(what) {}
};

struct IllConditioned : std::runtime_error {
  explicit IllConditioned(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidCovariance : std::runtime_error {
  double most_negative_eigenvalue;
  InvalidCovariance(const std::string& what, double lam)
      : std::runtime_error(what + " (most negative eigenvalue " + std::to_string(lam) + ")"),
        most_negative_eigenvalue(lam) {}
};

struct EmptyWindow : std::runtime_error {
  explicit EmptyWindow(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewGaps : std::runtime_error {
  explicit TooFewGaps(const std::string& what) : std::runtime_error(what) {}
};

struct BulkViolation : std::runtime_error {
  explicit BulkViolation(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
  explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct StepFloor : std::runtime_error {
  explicit StepFloor(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dysonlab
