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

// Command-line front door: density | solve | stability | local-law | dbm |
// ensemble-check. Configs are JSON; bulk outputs CSV; plots SVG. Outputs are
// deterministic in (config, seed) for any thread count.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dysonlab/dbm.hpp"
#include "dysonlab/ensembles.hpp"
#include "dysonlab/errors.hpp"
#include "dysonlab/io.hpp"
#include "dysonlab/linalg.hpp"
#include "dysonlab/locallaw.hpp"
#include "dysonlab/mde.hpp"
#include "dysonlab/parallel.hpp"
#include "dysonlab/vde.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dysonlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

struct Resolved {
  json config;
  std::uint64_t seed = 1;
  int threads = 0;
  fs::path out_dir;
};

Resolved resolve(const GlobalArgs& args) {
  Resolved r;
  if (!args.config_path.empty()) {
    r.config = json::parse(io::read_text(args.config_path));
  } else {
    r.config = json::object();
  }
  if (r.config.contains("seed")) r.seed = r.config["seed"].get<std::uint64_t>();
  if (args.seed) r.seed = *args.seed;
  r.config["seed"] = r.seed;
  if (r.config.contains("threads")) r.threads = r.config["threads"].get<int>();
  if (args.threads) r.threads = *args.threads;
  r.config["threads"] = r.threads;
  std::string out = r.config.value("output_dir", std::string("out"));
  if (args.out) out = *args.out;
  r.config["output_dir"] = out;
  r.out_dir = out;
  fs::create_directories(r.out_dir);
  return r;
}

std::vector<double> make_grid(const json& g) {
  const double lo = g.at("min").get<double>();
  const double hi = g.at("max").get<double>();
  const int pts = g.at("points").get<int>();
  if (pts < 2 || !(hi > lo)) throw InvalidInput("grid: need min < max and points >= 2");
  std::vector<double> grid(pts);
  for (int k = 0; k < pts; ++k) grid[k] = lo + (hi - lo) * k / (pts - 1);
  return grid;
}

json vector_to_json(const Eigen::VectorXcd& v) {
  std::vector<double> interleaved;
  interleaved.reserve(2 * v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    interleaved.push_back(v(i).real());
    interleaved.push_back(v(i).imag());
  }
  return interleaved;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  std::vector<double> interleaved;
  interleaved.reserve(2 * m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      interleaved.push_back(m(r, c).real());
      interleaved.push_back(m(r, c).imag());
    }
  return interleaved;
}

int cmd_density(const Resolved& r) {
  const VarianceMatrix s = VarianceMatrix::from_json(r.config.at("variance_matrix"));
  const auto grid = make_grid(r.config.at("grid"));
  const double eta = r.config.at("eta").get<double>();
  const bool components = r.config.value("components", false);
  const double threshold = r.config.value("support_threshold", 1e-3);

  const DensityCurve d = vde::sc_density(s, grid, eta, components, r.threads);
  io::write_density_csv(r.out_dir / "density.csv", d);
  io::write_svg_chart(r.out_dir / "density.svg", "self-consistent density of states",
                      {{"rho", d.grid, d.rho}});
  const SupportSet sup = support_set(d, threshold);
  json sup_json = json::array();
  for (const auto& iv : sup.intervals) sup_json.push_back({iv.first, iv.second});
  io::write_text(r.out_dir / "support.json",
                 json{{"threshold", threshold}, {"intervals", sup_json}}.dump(2) + "\n");

  const bool partial = !d.all_valid();
  json cfg = r.config;
  if (partial) cfg["status"] = "partial";
  io::write_manifest(r.out_dir, cfg, {"density.csv", "density.svg", "support.json"});
  return partial ? kExitNumeric : kExitOk;
}

int cmd_solve(const Resolved& r) {
  const std::string target = r.config.value("target", std::string("vde"));
  const double zre = r.config.at("z").at("re").get<double>();
  const double zim = r.config.at("z").at("im").get<double>();
  const HalfPlanePoint z(zre, zim);
  json out;
  if (target == "vde") {
    const VarianceMatrix s = VarianceMatrix::from_json(r.config.at("variance_matrix"));
    vde::SolverOpts opts;
    opts.tol = r.config.value("tol", opts.tol);
    const auto sol = vde::solve_vde(s, z, opts);
    out = {{"target", "vde"},
           {"n", s.n()},
           {"z", {{"re", zre}, {"im", zim}}},
           {"residual", sol.residual},
           {"m", vector_to_json(sol.m)}};
  } else if (target == "mde") {
    const auto spec = mde::SelfEnergySpec::from_json(r.config.at("self_energy"));
    mde::MdeOpts opts;
    opts.tol = r.config.value("tol", opts.tol);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(spec.n, spec.n);
    const auto sol = mde::solve_mde(spec, a, z, opts);
    out = {{"target", "mde"},
           {"n", spec.n},
           {"z", {{"re", zre}, {"im", zim}}},
           {"residual", sol.residual},
           {"M", matrix_to_json(sol.M)}};
  } else {
    throw InvalidInput("solve: target must be vde or mde");
  }
  io::write_text(r.out_dir / "solution.json", out.dump(2) + "\n");
  io::write_manifest(r.out_dir, r.config, {"solution.json"});
  return kExitOk;
}

int cmd_stability(const Resolved& r) {
  const VarianceMatrix s = VarianceMatrix::from_json(r.config.at("variance_matrix"));
  const std::string kind_s = r.config.value("norm_kind", std::string("l2"));
  const vde::NormKind kind = kind_s == "sup" ? vde::NormKind::sup : vde::NormKind::l2;
  std::vector<std::pair<double, double>> points;
  for (const auto& p : r.config.at("points"))
    points.emplace_back(p.at("re").get<double>(), p.at("im").get<double>());
  std::vector<std::vector<double>> rows(points.size());
  parallel_for(static_cast<int>(points.size()), r.threads, [&](int k) {
    const HalfPlanePoint z(points[k].first, points[k].second);
    const auto sol = vde::solve_vde(s, z);
    const double norm = vde::stability_inverse_norm(s, sol.m, kind);
    const auto f = vde::saturated_f(s, sol.m);
    rows[k] = {z.re(), z.im(), norm, f.norm, f.gap};
  });
  io::write_csv(r.out_dir / "stability.csv", "re,im,inverse_stability_norm,f_norm,f_gap", rows);
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    xs.push_back(row[1]);
    ys.push_back(row[2]);
  }
  io::write_svg_chart(r.out_dir / "stability.svg", "inverse stability norm", {{kind_s, xs, ys}});
  io::write_manifest(r.out_dir, r.config, {"stability.csv", "stability.svg"});
  return kExitOk;
}

int cmd_local_law(const Resolved& r) {
  const auto ensemble = ensembles::EnsembleSpec::from_json(r.config.at("ensemble"));
  const double E = r.config.at("E").get<double>();
  const auto n_list = r.config.at("n_list").get<std::vector<int>>();
  const auto eta_list = r.config.at("eta_list").get<std::vector<double>>();
  const int seeds = r.config.at("seeds").get<int>();

  const auto study = locallaw::scaling_study(ensemble, n_list, eta_list, seeds, E, r.threads);
  std::vector<std::vector<double>> rows;
  for (const auto& row : study.rows)
    rows.push_back({static_cast<double>(row.n), row.eta, static_cast<double>(row.seed),
                    row.entrywise, row.isotropic, row.averaged, row.d_maxnorm});
  io::write_csv(r.out_dir / "scaling.csv", "n,eta,seed,entrywise,isotropic,averaged,d_maxnorm",
                rows);
  json slopes = {
      {"entrywise", {{"slope", study.entrywise.slope}, {"half_width", study.entrywise.half_width}}},
      {"isotropic", {{"slope", study.isotropic.slope}, {"half_width", study.isotropic.half_width}}},
      {"averaged", {{"slope", study.averaged.slope}, {"half_width", study.averaged.half_width}}},
      {"d_maxnorm", {{"slope", study.d_maxnorm.slope}, {"half_width", study.d_maxnorm.half_width}}},
      {"max_ward_defect", study.max_ward_defect},
      {"max_d_identity_defect", study.max_d_identity_defect}};
  io::write_text(r.out_dir / "slopes.json", slopes.dump(2) + "\n");
  // log-log medians per error kind
  std::vector<io::Series> series(4);
  const char* names[4] = {"entrywise", "isotropic", "averaged", "d_maxnorm"};
  for (int k = 0; k < 4; ++k) series[k].label = names[k];
  for (const auto& [n, eta, med, p90] : study.axis_stats) {
    (void)p90;
    const double lx = std::log10(n * eta);
    series[0].x.push_back(lx);
    series[0].y.push_back(std::log10(med.entrywise));
    series[1].x.push_back(lx);
    series[1].y.push_back(std::log10(med.isotropic));
    series[2].x.push_back(lx);
    series[2].y.push_back(std::log10(med.averaged));
    series[3].x.push_back(lx);
    series[3].y.push_back(std::log10(med.d_maxnorm));
  }
  io::write_svg_chart(r.out_dir / "scaling.svg", "local-law errors vs n*eta (log10)", series);
  io::write_manifest(r.out_dir, r.config, {"scaling.csv", "slopes.json", "scaling.svg"});
  return kExitOk;
}

int cmd_dbm(const Resolved& r) {
  const int n = r.config.at("n").get<int>();
  const int beta = r.config.value("beta", 2);
  const double t_end = r.config.at("t_end").get<double>();
  const double dt = r.config.at("dt").get<double>();
  const int stride = r.config.value("stride", 100);
  const int paths = r.config.value("paths", 1);
  const auto window_v = r.config.value("window", std::vector<double>{-1.0, 1.0});
  const std::pair<double, double> window{window_v.at(0), window_v.at(1)};

  // semicircle reference density for the gap rescaling
  std::vector<double> grid;
  for (int k = 0; k <= 600; ++k) grid.push_back(-3.0 + 6.0 * k / 600.0);
  const DensityCurve ref =
      vde::sc_density(VarianceMatrix::wigner(64), grid, 1e-3, false, r.threads);

  const auto sym =
      beta == 1 ? ensembles::Symmetry::real_symmetric : ensembles::Symmetry::complex_hermitian;
  const auto spec = ensembles::EnsembleSpec::make_wigner(n, sym);

  std::vector<std::vector<double>> trajectory;  // path 0 only
  std::vector<std::vector<double>> gap_rows(paths);
  std::vector<int> status(paths, kExitOk);
  parallel_for(paths, r.threads, [&](int p) {
    const auto h = ensembles::sample_one(spec, r.seed, static_cast<std::uint64_t>(p));
    const auto eg = linalg::eigh(h, false);
    dbm::DbmState state{eg.evals, 0.0, beta};
    dbm::DbmOpts opts;
    int count = 0;
    if (p == 0) {
      opts.observer = [&](const dbm::DbmState& s) {
        if (++count % stride) return;
        std::vector<double> row = {s.t};
        for (int i = 0; i < n; ++i) row.push_back(s.lambdas(i));
        trajectory.push_back(std::move(row));
      };
    }
    try {
      const auto final_state =
          dbm::dbm_simulate(state, t_end, dt, r.seed + 1000003ULL * (p + 1), opts);
      const auto gaps = dbm::normalized_gaps(final_state.lambdas, ref, window);
      gap_rows[p] = gaps.gaps;
    } catch (const StepFloor&) {
      status[p] = kExitNumeric;
    }
  });

  std::string traj_header = "t";
  for (int i = 0; i < n; ++i) traj_header += ",lambda_" + std::to_string(i);
  io::write_csv(r.out_dir / "trajectory.csv", traj_header, trajectory);

  std::vector<std::vector<double>> gaps_flat;
  for (int p = 0; p < paths; ++p)
    for (double g : gap_rows[p]) gaps_flat.push_back({static_cast<double>(p), g});
  io::write_csv(r.out_dir / "gaps.csv", "path,gap", gaps_flat);

  // histogram over [0, 4]
  constexpr int kBins = 40;
  std::vector<double> hist(kBins, 0.0);
  double total = 0.0;
  for (const auto& row : gaps_flat) {
    const double g = row[1];
    if (g >= 0.0 && g < 4.0) {
      hist[static_cast<int>(g / (4.0 / kBins))] += 1.0;
      total += 1.0;
    }
  }
  std::vector<std::vector<double>> hist_rows;
  std::vector<double> hx, hy;
  for (int b = 0; b < kBins; ++b) {
    const double center = (b + 0.5) * 4.0 / kBins;
    const double density = total > 0 ? hist[b] / total / (4.0 / kBins) : 0.0;
    hist_rows.push_back({center, density});
    hx.push_back(center);
    hy.push_back(density);
  }
  io::write_csv(r.out_dir / "gap_hist.csv", "gap,density", hist_rows);
  io::write_svg_chart(r.out_dir / "gap_hist.svg", "normalized gap histogram",
                      {{"density", hx, hy}});
  io::write_manifest(r.out_dir, r.config,
                     {"trajectory.csv", "gaps.csv", "gap_hist.csv", "gap_hist.svg"});
  for (int p = 0; p < paths; ++p)
    if (status[p] != kExitOk) return kExitNumeric;
  return kExitOk;
}

int cmd_ensemble_check(const Resolved& r) {
  const auto spec = ensembles::EnsembleSpec::from_json(r.config.at("ensemble"));
  const int count = r.config.value("count", 200);
  const auto batch = ensembles::sample(spec, r.seed, count);

  std::vector<std::string> artifacts = {"report.json"};
  const int dump = r.config.value("dump_samples", 0);
  if (dump > 0) {
    // row-major interleaved re/im, one array per matrix
    json samples = json::array();
    for (int k = 0; k < std::min(dump, count); ++k)
      samples.push_back(matrix_to_json(batch.matrices[k]));
    io::write_text(r.out_dir / "samples.json",
                   json{{"ensemble", spec.to_json()}, {"matrices", samples}}.dump() + "\n");
    artifacts.push_back("samples.json");
  }

  double herm_defect = 0.0, tr_h2 = 0.0, max_fourth = 0.0;
  for (const auto& h : batch.matrices) {
    herm_defect = std::max(herm_defect, (h - h.adjoint()).cwiseAbs().maxCoeff());
    tr_h2 += (h * h).trace().real() / spec.n;
  }
  tr_h2 /= count;
  // empirical fourth moment of sqrt(n) h_ij against the law's analytic value
  const double law_m4 = spec.entry_law == ensembles::EntryLaw::gaussian     ? 3.0
                        : spec.entry_law == ensembles::EntryLaw::rademacher ? 1.0
                                                                            : 1.8;
  for (int i = 0; i < spec.n; ++i)
    for (int j = i + 1; j < spec.n; ++j) {
      double m4 = 0.0;
      for (const auto& h : batch.matrices) {
        const double x = std::abs(h(i, j)) * std::sqrt(static_cast<double>(spec.n));
        m4 += x * x * x * x;
      }
      max_fourth = std::max(max_fourth, m4 / count);
    }
  json report = {{"count", count},
                 {"hermiticity_defect", herm_defect},
                 {"mean_tr_h2_over_n", tr_h2},
                 {"max_fourth_moment", max_fourth},
                 {"law_fourth_moment", law_m4}};
  if (spec.kind != ensembles::Kind::gaussian_correlated) {
    const auto s = spec.effective_variances();
    double max_row_dev = 0.0;
    for (int i = 0; i < spec.n; ++i) {
      double emp = 0.0;
      for (const auto& h : batch.matrices) emp += h.row(i).squaredNorm();
      emp /= count;
      // diagonal carries (2/beta) s_ii by convention
      const double expect =
          s.entries().row(i).sum() + (spec.beta() == 1 ? s.entries()(i, i) : 0.0);
      max_row_dev = std::max(max_row_dev, std::abs(emp - expect));
    }
    report["max_row_variance_dev"] = max_row_dev;
  }
  io::write_text(r.out_dir / "report.json", report.dump(2) + "\n");
  io::write_manifest(r.out_dir, r.config, artifacts);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dysonlab: Dyson-equation solvers and random-matrix diagnostics"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "JSON config file");
  std::uint64_t seed_opt = 0;
  int threads_opt = 0;
  std::string out_opt;
  auto* seed_flag = app.add_option("--seed", seed_opt, "seed override");
  auto* threads_flag =
      app.add_option("--threads", threads_opt, "thread budget (0 = auto, env DYSONLAB_THREADS)");
  auto* out_flag = app.add_option("--out", out_opt, "output directory");

  auto* density = app.add_subcommand("density", "self-consistent density sweep");
  auto* solve = app.add_subcommand("solve", "solve the vector or matrix Dyson equation");
  auto* stability = app.add_subcommand("stability", "stability-operator norms along a z list");
  auto* local_law = app.add_subcommand("local-law", "Monte-Carlo local-law scaling study");
  auto* dbm_cmd = app.add_subcommand("dbm", "Dyson Brownian motion runs and gap statistics");
  auto* ensemble_check = app.add_subcommand("ensemble-check", "sampling moment checks");
  for (auto* sc : {density, solve, stability, local_law, dbm_cmd, ensemble_check})
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (seed_flag->count()) args.seed = seed_opt;
  if (threads_flag->count()) args.threads = threads_opt;
  if (out_flag->count()) args.out = out_opt;

  try {
    const Resolved r = resolve(args);
    if (density->parsed()) return cmd_density(r);
    if (solve->parsed()) return cmd_solve(r);
    if (stability->parsed()) return cmd_stability(r);
    if (local_law->parsed()) return cmd_local_law(r);
    if (dbm_cmd->parsed()) return cmd_dbm(r);
    if (ensemble_check->parsed()) return cmd_ensemble_check(r);
    std::cerr << "no subcommand\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonConvergence& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const LosesPositivity& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const SingularStability& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const StepFloor& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const QuadratureFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
