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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dysonlab/density.hpp"
#include "json.hpp"

namespace dysonlab::io {

/// 17 significant digits; enough to round-trip a double, so repeated runs are
/// byte-comparable.
std::string fmt17(double v);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// CSV with a fixed header; every cell rendered by fmt17.
void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

/// DensityCurve export, header "tau,rho[,nu_0..nu_{n-1}]".
void write_density_csv(const std::filesystem::path& path, const DensityCurve& d);

/// Minimal deterministic SVG polyline chart. One polyline per series; axes
/// are linear in the transformed coordinates the caller supplies.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<Series>& series);

std::uint64_t fnv1a64(const std::string& bytes);

/// manifest.json: resolved config echo plus per-file FNV-1a checksums.
void write_manifest(const std::filesystem::path& out_dir, const nlohmann::json& resolved_config,
                    const std::vector<std::string>& artifact_names);

}  // namespace dysonlab::io
