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

#include "dysonlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dysonlab/errors.hpp"

namespace dysonlab::io {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::string out = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += fmt17(row[k]);
    }
    out += '\n';
  }
  write_text(path, out);
}

void write_density_csv(const std::filesystem::path& path, const DensityCurve& d) {
  std::string header = "tau,rho";
  const int n = d.has_components() ? static_cast<int>(d.components.rows()) : 0;
  for (int i = 0; i < n; ++i) header += ",nu_" + std::to_string(i);
  std::vector<std::vector<double>> rows;
  rows.reserve(d.grid.size());
  for (std::size_t k = 0; k < d.grid.size(); ++k) {
    std::vector<double> row = {d.grid[k], d.rho[k]};
    for (int i = 0; i < n; ++i) row.push_back(d.components(i, static_cast<Eigen::Index>(k)));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<Series>& series) {
  constexpr double w = 720.0, h = 480.0, pad = 56.0;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xmin = std::min(xmin, s.x[k]);
      xmax = std::max(xmax, s.x[k]);
      ymin = std::min(ymin, s.y[k]);
      ymax = std::max(ymax, s.y[k]);
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto sx = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - (y - ymin) / (ymax - ymin) * (h - 2 * pad); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
  svg << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\""
      << h - pad << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << pad << "\" y=\"" << h - pad + 18 << "\" font-size=\"11\">"
      << fmt17(xmin) << "</text>\n";
  svg << "<text x=\"" << w - pad << "\" y=\"" << h - pad + 18
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt17(xmax) << "</text>\n";
  svg << "<text x=\"" << pad - 4 << "\" y=\"" << h - pad
      << "\" text-anchor=\"end\" font-size=\"11\">" << fmt17(ymin) << "</text>\n";
  svg << "<text x=\"" << pad - 4 << "\" y=\"" << pad << "\" text-anchor=\"end\" font-size=\"11\">"
      << fmt17(ymax) << "</text>\n";
  int ci = 0;
  for (const auto& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << colors[ci % 6] << "\" stroke-width=\"1.5\" "
        << "points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      svg << fmt17(sx(s.x[k])) << ',' << fmt17(sy(s.y[k])) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << w - pad - 4 << "\" y=\"" << pad + 16 * (ci + 1)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[ci % 6] << "\">" << s.label
        << "</text>\n";
    ++ci;
  }
  svg << "</svg>\n";
  write_text(path, svg.str());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_manifest(const std::filesystem::path& out_dir, const nlohmann::json& resolved_config,
                    const std::vector<std::string>& artifact_names) {
  nlohmann::json manifest;
  manifest["config"] = resolved_config;
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& name : artifact_names) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(read_text(out_dir / name))));
    checks[name] = buf;
  }
  manifest["checksums"] = checks;
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace dysonlab::io
