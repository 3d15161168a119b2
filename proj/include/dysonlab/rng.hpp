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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace dysonlab::crng {

// Counter-based variate derivation: every draw is a pure function of
// (seed, a, b, c), so sampling is reproducible and order-independent no
// matter how work is distributed over threads. The derivation tree
// (seed, sample-index, flattened entry, slot) is the contract; the mixer
// itself is an implementation detail.

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL;
  x = mix64(x ^ (a * 0xd6e8feb86659fd93ULL));
  x = mix64(x ^ (b * 0xca5a826395121157ULL));
  x = mix64(x ^ (c * 0x8cb92ba72f3d8dd7ULL));
  return mix64(x);
}

// Uniform in the open interval (0, 1).
inline double to_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return to_unit(derive(seed, a, b, c));
}

// Two independent N(0,1) variates from one counter via Box-Muller.
inline std::pair<double, double> normal2(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                         std::uint64_t c) {
  const double u1 = to_unit(derive(seed, a, b, 2 * c));
  const double u2 = to_unit(derive(seed, a, b, 2 * c + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

inline double normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return normal2(seed, a, b, c).first;
}

// Standardized laws (mean 0, variance 1).
inline double rademacher(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return (derive(seed, a, b, c) & 1ULL) ? 1.0 : -1.0;
}

inline double uniform_sym(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // U(-sqrt(3), sqrt(3)) has unit variance.
  return (2.0 * uniform(seed, a, b, c) - 1.0) * std::sqrt(3.0);
}

}  // namespace dysonlab::crng
