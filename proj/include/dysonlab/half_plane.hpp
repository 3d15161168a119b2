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

#include <complex>

#include "dysonlab/errors.hpp"

namespace dysonlab {

/// Spectral parameter z = E + i*eta restricted to the open upper half plane.
/// Construction rejects eta <= 0, so downstream code never has to re-check.
class HalfPlanePoint {
 public:
  HalfPlanePoint(double re, double im) : re_(re), im_(im) {
    if (!(im > 0.0)) throw InvalidInput("HalfPlanePoint: Im z must be > 0");
  }
  explicit HalfPlanePoint(std::complex<double> z) : HalfPlanePoint(z.real(), z.imag()) {}

  double re() const { return re_; }
  double im() const { return im_; }
  std::complex<double> z() const { return {re_, im_}; }

 private:
  double re_;
  double im_;
};

}  // namespace dysonlab
