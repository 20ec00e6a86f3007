#include "rotjac/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "rotjac/analysis.hpp"
#include "rotjac/assertions.hpp"
#include "rotjac/experiments.hpp"
#include "rotjac/jacobians.hpp"
#include "rotjac/report.hpp"
#include "rotjac/rng.hpp"
#include "rotjac/sampling.hpp"

namespace rotjac {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgError = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAssertion = 3;

struct OutputOptions {
  std::string out;
  std::string format = "csv";
  std::string svg;
};

struct SeedOption {
  std::optional<std::uint64_t> seed;

  std::uint64_t resolve() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("ROTJAC_SEED")) {
      return std::strtoull(env, nullptr, 10);
    }
    std::random_device rd;
    const std::uint64_t s =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    std::cout << "selected random seed: " << s << "\n";
    return s;
  }
};

std::string manifest_path_for(const std::string& out) {
  if (out.size() > 4 && out.rfind(".csv") == out.size() - 4)
    return out.substr(0, out.size() - 4) + ".manifest.json";
  return out + ".manifest.json";
}

/// Writes records + manifest per --out/--format, prints summaries and
/// assertion outcomes, returns the process exit code.
int finish_run(const OutputOptions& io, RunManifest manifest, const Table& records,
               const std::vector<AssertionResult>& assertions,
               const std::optional<SvgPlot>& figure) {
  manifest.finished_at = iso8601_now();
  manifest.assertions = assertions;
  if (!io.out.empty()) {
    if (io.format == "json") {
      write_json(manifest, records, io.out);
    } else {
      write_csv(records, io.out);
      write_manifest(manifest, manifest_path_for(io.out));
    }
  }
  if (!io.svg.empty() && figure) render_svg(*figure, io.svg);

  for (const auto& s : manifest.summaries) {
    std::cout << "  " << s.name << " = " << format_double(s.value);
    if (s.std_error > 0.0) std::cout << " +- " << format_double(s.std_error);
    if (s.prediction) std::cout << "  (prediction " << format_double(*s.prediction) << ")";
    if (s.relative_error) std::cout << "  rel.err " << format_double(*s.relative_error);
    std::cout << "\n";
  }
  bool ok = true;
  for (const auto& a : assertions) {
    (a.pass ? std::cout : std::cerr)
        << (a.pass ? "  [ok]   " : "  [FAIL] ") << a.name << " -- " << a.detail << "\n";
    ok = ok && a.pass;
  }
  return ok ? kExitOk : kExitAssertion;
}

RunManifest start_manifest(const std::string& subcommand, std::uint64_t seed,
                           std::vector<std::pair<std::string, std::string>> config) {
  RunManifest m;
  m.tool_version = kToolVersion;
  m.subcommand = subcommand;
  m.master_seed = seed;
  m.config = std::move(config);
  m.started_at = iso8601_now();
  return m;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

Mat3 parse_matrix(const std::vector<double>& entries) {
  if (entries.size() != 9)
    throw CLI::ValidationError("--matrix", "expected 9 comma-separated reals (row-major)");
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = entries[3 * i + j];
  return m;
}

// --------------------------------------------------------------------------
// Figures

SvgPlot kappa_figure(const KappaTableResult& r) {
  SvgPlot plot;
  plot.title = "Mean condition number of the projection Jacobian vs noise";
  plot.x_label = "sigma";
  plot.y_label = "mean kappa";
  SvgSeries emp{"empirical", {}, false, false, "#1f77b4"};
  double max_sigma = 0.0;
  for (const auto& row : r.rows) {
    emp.points.emplace_back(row.sigma, row.kappa_mean);
    max_sigma = std::max(max_sigma, row.sigma);
  }
  SvgSeries formula{"first-order formula", {}, false, true, "#d62728"};
  const double c3 = goe3_top_eigenvalue();
  const double hi = std::min(max_sigma * 1.05, 2.0 / c3 * 0.95);
  for (int i = 0; i <= 100; ++i) {
    const double s = hi * i / 100.0;
    formula.points.emplace_back(s, (2.0 + s * c3) / (2.0 - s * c3));
  }
  plot.series = {formula, emp};
  return plot;
}

SvgPlot projection_figure(const ProjectionErrorResult& r) {
  SvgPlot plot;
  plot.title = "Projection error vs noise level";
  plot.x_label = "sigma";
  plot.y_label = "mean squared Frobenius error";
  plot.log_x = true;
  plot.log_y = true;
  SvgSeries svd{"svd", {}, false, false, "#1f77b4"};
  SvgSeries gs{"gram-schmidt", {}, false, false, "#d62728"};
  SvgSeries psvd{"3 sigma^2", {}, false, true, "#1f77b4"};
  SvgSeries pgs{"6 sigma^2", {}, false, true, "#d62728"};
  for (const auto& row : r.rows) {
    if (row.sigma <= 0.0) continue;
    svd.points.emplace_back(row.sigma, row.svd_mse);
    gs.points.emplace_back(row.sigma, row.gs_mse);
    psvd.points.emplace_back(row.sigma, row.pred_svd);
    pgs.points.emplace_back(row.sigma, row.pred_gs);
  }
  plot.series = {svd, gs, psvd, pgs};
  return plot;
}

SvgPlot coordinate_figure(const CoordinateDependenceResult& r) {
  SvgPlot plot;
  plot.title = "Frame-change inconsistency histogram";
  plot.x_label = "angle (degrees)";
  plot.y_label = "samples per 1-degree bin";
  SvgSeries svd{"svd", {}, false, false, "#1f77b4"};
  SvgSeries gs{"gram-schmidt", {}, false, false, "#d62728"};
  for (int b = 0; b < 180; ++b) {
    svd.points.emplace_back(b + 0.5, static_cast<double>(r.svd_histogram[b]));
    gs.points.emplace_back(b + 0.5, static_cast<double>(r.gs_histogram[b]));
  }
  plot.series = {svd, gs};
  return plot;
}

SvgPlot per_column_figure(const PerColumnResult& r) {
  SvgPlot plot;
  plot.title = "Per-column RMS projection error";
  plot.x_label = "column";
  plot.y_label = "rms error";
  for (const auto& row : r.rows) {
    SvgSeries gs{"gs (sigma=" + format_double(row.sigma) + ")", {}, false, false, "#d62728"};
    SvgSeries svd{"svd (sigma=" + format_double(row.sigma) + ")", {}, false, false, "#1f77b4"};
    for (int c = 0; c < 3; ++c) {
      gs.points.emplace_back(c + 1.0, row.gs_rms[c]);
      svd.points.emplace_back(c + 1.0, row.svd_rms[c]);
    }
    plot.series.push_back(gs);
    plot.series.push_back(svd);
  }
  return plot;
}

SvgPlot scatter_figure(const GradientScatterResult& r) {
  SvgPlot plot;
  plot.title = "Loss gradient vs elementwise error (entry 1,1)";
  plot.x_label = "error M11 - R*11";
  plot.y_label = "gradient";
  SvgSeries svd{"svd-train", {}, true, false, "#d62728"};
  SvgSeries diag{"direct (2e)", {}, false, true, "#7f7f7f"};
  double e_lo = 0.0, e_hi = 0.0;
  for (const auto& row : r.records.rows) {
    const double e = std::get<double>(row[1]);
    e_lo = std::min(e_lo, e);
    e_hi = std::max(e_hi, e);
    if (std::holds_alternative<double>(row[3]))
      svd.points.emplace_back(e, std::get<double>(row[3]));
  }
  diag.points = {{e_lo, 2.0 * e_lo}, {e_hi, 2.0 * e_hi}};
  plot.series = {svd, diag};
  return plot;
}

SvgPlot convergence_figure(const ConvergenceRaceResult& r) {
  SvgPlot plot;
  plot.title = "Gradient descent race";
  plot.x_label = "iteration";
  plot.y_label = "loss";
  plot.log_y = true;
  SvgSeries direct{"direct", {}, false, false, "#1f77b4"};
  SvgSeries svd{"svd-train", {}, false, false, "#d62728"};
  for (const auto& row : r.records.rows) {
    const auto& method = std::get<std::string>(row[0]);
    const double it = static_cast<double>(std::get<std::uint64_t>(row[1]));
    const double loss = std::get<double>(row[2]);
    (method == "direct" ? direct : svd).points.emplace_back(it, loss);
  }
  plot.series = {direct, svd};
  return plot;
}

SvgPlot geodesic_figure(const GeodesicMapResult& r, const GeodesicMapConfig& cfg) {
  SvgPlot plot;
  plot.title = "Compounded geodesic gradient over (theta, s3)";
  plot.x_label = "theta (rad)";
  plot.y_label = "gradient norm";
  plot.log_x = true;
  plot.log_y = true;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::size_t ci = 0;
  for (double s3 : cfg.s3_grid) {
    SvgSeries norm{"norm s3=" + format_double(s3), {}, false, false, colors[ci % 5]};
    SvgSeries bound{"bound s3=" + format_double(s3), {}, false, true, colors[ci % 5]};
    for (const auto& row : r.records.rows) {
      if (std::get<double>(row[1]) != s3) continue;
      if (!std::holds_alternative<double>(row[2])) continue;
      norm.points.emplace_back(std::get<double>(row[0]), std::get<double>(row[2]));
      bound.points.emplace_back(std::get<double>(row[0]), std::get<double>(row[3]));
    }
    plot.series.push_back(norm);
    if (ci == 0) plot.series.push_back(bound);
    ++ci;
  }
  return plot;
}

// --------------------------------------------------------------------------

int build_and_parse(CLI::App& app, int argc, const char* const* argv) {
  SeedOption seed;
  OutputOptions io;
  ExperimentConfig cfg;
  std::vector<double> sigmas;
  double sigma_single = -1.0;
  std::size_t samples = 0;
  unsigned parallelism = 0;
  std::string gs_mode = "columns";
  int exit_code = kExitOk;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&seed](std::uint64_t v) { seed.seed = v; }, "master seed (u64)");
  };
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", io.out, "output path for records (+ manifest)");
    cmd->add_option("--format", io.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--svg", io.svg, "write an SVG figure to this path");
  };
  auto add_common = [&](CLI::App* cmd, std::size_t default_samples) {
    add_seed(cmd);
    cmd->add_option("--samples", samples, "Monte-Carlo samples")->default_val(default_samples);
    cmd->add_option("--parallelism", parallelism, "worker threads (default: available cores)");
    add_output(cmd);
  };
  auto add_sigmas = [&](CLI::App* cmd, std::vector<double> defaults) {
    cmd->add_option("--sigmas", sigmas, "comma-separated noise levels")->delimiter(',');
    cmd->add_option("--sigma", sigma_single, "single noise level");
    cmd->parse_complete_callback([&sigmas, &sigma_single, defaults] {
      if (sigmas.empty())
        sigmas = sigma_single >= 0.0 ? std::vector{sigma_single} : defaults;
      else if (sigma_single >= 0.0)
        throw CLI::ValidationError("--sigma", "use either --sigma or --sigmas");
    });
  };
  auto resolved_config = [&](std::uint64_t s) {
    cfg.sigmas = sigmas;
    cfg.samples = samples;
    cfg.master_seed = s;
    cfg.parallelism = parallelism == 0 ? std::thread::hardware_concurrency() : parallelism;
    if (cfg.parallelism == 0) cfg.parallelism = 1;
    cfg.gs_mode = gs_mode == "direct" ? GsInputMode::kDirectSixD : GsInputMode::kMatrixColumns;
    return std::vector<std::pair<std::string, std::string>>{
        {"sigmas", join_doubles(cfg.sigmas)},
        {"samples", std::to_string(cfg.samples)},
        {"parallelism", std::to_string(cfg.parallelism)},
        {"gs_mode", gs_mode},
    };
  };

  // ----- jacobian-check -----
  JacobianCheckConfig jc;
  {
    auto* cmd = app.add_subcommand("jacobian-check",
                                   "validate analytic Jacobians against central differences");
    cmd->add_option("--trials", jc.trials, "number of random trials")->default_val(1000);
    add_seed(cmd);
    cmd->add_option("--parallelism", parallelism, "worker threads");
    add_output(cmd);
    cmd->callback([&] {
      jc.master_seed = seed.resolve();
      jc.parallelism = parallelism == 0 ? std::thread::hardware_concurrency() : parallelism;
      auto manifest = start_manifest("jacobian-check", jc.master_seed,
                                     {{"trials", std::to_string(jc.trials)}});
      const JacobianCheckResult result = run_jacobian_check(jc);
      manifest.summaries = result.summaries;
      exit_code =
          finish_run(io, manifest, result.records, check_jacobian_check(result), std::nullopt);
    });
  }

  // ----- spectrum -----
  std::vector<double> matrix_entries;
  {
    auto* cmd = app.add_subcommand("spectrum", "closed-form Jacobian spectrum of one matrix");
    cmd->add_option("--matrix", matrix_entries, "9 comma-separated reals, row-major")
        ->delimiter(',')
        ->required();
    add_output(cmd);
    cmd->callback([&] {
      const Mat3 m = parse_matrix(matrix_entries);
      const SpectrumReport rep = svd_jacobian_spectrum(m);
      const Jacobian9x9 j = svd_jacobian(m);
      const Eigen::JacobiSVD<Eigen::MatrixXd> jsvd(j);
      const Eigen::VectorXd sv = jsvd.singularValues();
      double consistency = 0.0;
      for (int i = 0; i < 3; ++i)
        consistency = std::max(consistency, std::abs(sv[i] - rep.nonzero_singular_values[i]));
      for (int i = 3; i < 9; ++i) consistency = std::max(consistency, sv[i]);

      std::cout << "nonzero singular values: {" << format_double(rep.nonzero_singular_values[2])
                << ", " << format_double(rep.nonzero_singular_values[1]) << ", "
                << format_double(rep.nonzero_singular_values[0]) << "}\n"
                << "spectral norm = " << format_double(rep.spectral_norm)
                << ", kappa = " << format_double(rep.condition_number) << ", rank = " << rep.rank
                << ", null space dim = " << rep.null_space_dim << "\n";

      auto manifest = start_manifest("spectrum", 0, {{"matrix", join_doubles(matrix_entries)}});
      Table t;
      t.columns = {"sv_max", "sv_mid",         "sv_min",
                   "spectral_norm", "condition_number", "rank",
                   "null_space_dim", "numerical_consistency"};
      t.rows.push_back({rep.nonzero_singular_values[0], rep.nonzero_singular_values[1],
                        rep.nonzero_singular_values[2], rep.spectral_norm, rep.condition_number,
                        static_cast<std::int64_t>(rep.rank),
                        static_cast<std::int64_t>(rep.null_space_dim), consistency});
      manifest.summaries = {
          {"spectral_norm", rep.spectral_norm, 0.0, 1, std::nullopt, std::nullopt},
          {"condition_number", rep.condition_number, 0.0, 1, std::nullopt, std::nullopt}};
      const std::vector<AssertionResult> checks = {
          {"closed form matches numerically decomposed 9x9 within 1e-9", consistency <= 1e-9,
           "max deviation " + format_double(consistency)}};
      exit_code = finish_run(io, manifest, t, checks, std::nullopt);
    });
  }

  // ----- gir -----
  std::vector<double> gir_entries;
  {
    auto* cmd =
        app.add_subcommand("gir", "gradient information retention of the projection Jacobian");
    cmd->add_option("--matrix", gir_entries,
                    "9 comma-separated reals, row-major (default: identity)")
        ->delimiter(',');
    add_common(cmd, 100000);
    cmd->callback([&] {
      const Mat3 m = gir_entries.empty() ? Mat3(Mat3::Identity()) : parse_matrix(gir_entries);
      const std::uint64_t s = seed.resolve();
      const Jacobian9x9 j = svd_jacobian(m);
      const double analytic = gradient_info_retention(j);

      RngStream stream(s);
      double sum_pull = 0.0, sum_g = 0.0;
      for (std::size_t i = 0; i < samples; ++i) {
        Vec9 g;
        for (int k = 0; k < 9; ++k) g[k] = stream.next_gaussian();
        sum_pull += (j.transpose() * g).squaredNorm();
        sum_g += g.squaredNorm();
      }
      // E|g|^2 = 9 = the ambient dimension, so E|J'g|^2 / E|g|^2 estimates
      // tr(JJ')/9 directly.
      const double mc_eta = sum_pull / sum_g;
      const double rel = std::abs(mc_eta - analytic) / analytic;

      auto manifest =
          start_manifest("gir", s,
                         {{"matrix", gir_entries.empty() ? "identity" : join_doubles(gir_entries)},
                          {"samples", std::to_string(samples)}});
      Table t;
      t.columns = {"analytic", "monte_carlo", "relative_deviation"};
      t.rows.push_back({analytic, mc_eta, rel});
      manifest.summaries = {{"gir_analytic", analytic, 0.0, 1, std::nullopt, std::nullopt},
                            {"gir_monte_carlo", mc_eta, 0.0, samples, analytic, rel}};
      std::vector<AssertionResult> checks = {
          {"monte-carlo estimate within 1% of trace formula", rel <= 0.01,
           "relative deviation " + format_double(rel)}};
      const bool is_rotation = (m.transpose() * m - Mat3::Identity()).norm() <= 1e-9 &&
                               std::abs(m.determinant() - 1.0) <= 1e-9;
      if (is_rotation)
        checks.push_back({"gir equals 1/3 on SO(3) within 1e-9",
                          std::abs(analytic - 1.0 / 3.0) <= 1e-9,
                          "analytic " + format_double(analytic)});
      exit_code = finish_run(io, manifest, t, checks, std::nullopt);
    });
  }

  // ----- Monte-Carlo experiment subcommands -----
  {
    auto* cmd =
        app.add_subcommand("kappa-table", "mean Jacobian condition number vs noise level");
    add_common(cmd, 50000);
    add_sigmas(cmd, {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0});
    cmd->callback([&] {
      const std::uint64_t s = seed.resolve();
      auto manifest = start_manifest("kappa-table", s, resolved_config(s));
      const KappaTableResult result = run_kappa_table(cfg);
      manifest.summaries = result.summaries;
      exit_code = finish_run(io, manifest, result.records, check_kappa_table(result),
                             kappa_figure(result));
    });
  }
  {
    auto* cmd =
        app.add_subcommand("projection-error", "mean squared projection error vs noise level");
    add_common(cmd, 5000);
    add_sigmas(cmd, {0.01, 0.02, 0.05, 0.1});
    cmd->add_option("--gs-mode", gs_mode, "columns|direct")
        ->check(CLI::IsMember({"columns", "direct"}));
    cmd->callback([&] {
      const std::uint64_t s = seed.resolve();
      auto manifest = start_manifest("projection-error", s, resolved_config(s));
      const ProjectionErrorResult result = run_projection_error(cfg);
      manifest.summaries = result.summaries;
      exit_code = finish_run(io, manifest, result.records, check_projection_error(result),
                             projection_figure(result));
    });
  }
  {
    auto* cmd = app.add_subcommand("coordinate-dependence",
                                   "projector output change under a rotated input frame");
    add_common(cmd, 10000);
    add_sigmas(cmd, {0.5});
    cmd->callback([&] {
      const std::uint64_t s = seed.resolve();
      auto manifest = start_manifest("coordinate-dependence", s, resolved_config(s));
      const CoordinateDependenceResult result = run_coordinate_dependence(cfg);
      manifest.summaries = result.summaries;
      exit_code = finish_run(io, manifest, result.records, check_coordinate_dependence(result),
                             coordinate_figure(result));
    });
  }
  {
    auto* cmd = app.add_subcommand("per-column", "per-column RMS projection error");
    add_common(cmd, 50000);
    add_sigmas(cmd, {0.5});
    cmd->add_option("--gs-mode", gs_mode, "columns|direct")
        ->check(CLI::IsMember({"columns", "direct"}));
    cmd->callback([&] {
      const std::uint64_t s = seed.resolve();
      auto manifest = start_manifest("per-column", s, resolved_config(s));
      const PerColumnResult result = run_per_column_error(cfg);
      manifest.summaries = result.summaries;
      exit_code = finish_run(io, manifest, result.records, check_per_column(result),
                             per_column_figure(result));
    });
  }
  {
    auto* cmd = app.add_subcommand("gradient-scatter",
                                   "per-sample loss gradients vs elementwise error");
    add_common(cmd, 10000);
    add_sigmas(cmd, {0.5});
    cmd->add_option("--gs-mode", gs_mode, "columns|direct")
        ->check(CLI::IsMember({"columns", "direct"}));
    cmd->callback([&] {
      const std::uint64_t s = seed.resolve();
      auto manifest = start_manifest("gradient-scatter", s, resolved_config(s));
      const GradientScatterResult result = run_gradient_scatter(cfg);
      manifest.summaries = result.summaries;
      exit_code = finish_run(io, manifest, result.records, check_gradient_scatter(result),
                             scatter_figure(result));
    });
  }

  // ----- convergence -----
  ConvergenceRaceConfig rc;
  std::vector<double> s0;
  {
    auto* cmd =
        app.add_subcommand("convergence", "gradient descent race: direct vs svd-train loss");
    cmd->add_option("--s0", s0, "initial singular values, 3 reals")->delimiter(',');
    cmd->add_option("--eta", rc.eta_svd, "svd-train step size")->default_val(0.3);
    cmd->add_option("--eta-direct", rc.eta_direct, "direct-regression step size")
        ->default_val(0.49);
    cmd->add_option("--target", rc.reduction_target, "component reduction factor to reach")
        ->default_val(100.0);
    cmd->add_option("--excite", rc.excite, "pair-direction excitation of the start")
        ->default_val(1e-3);
    add_seed(cmd);
    add_output(cmd);
    cmd->callback([&] {
      if (!s0.empty()) {
        if (s0.size() != 3) throw CLI::ValidationError("--s0", "expected 3 reals");
        rc.s0 = Vec3(s0[0], s0[1], s0[2]);
      }
      rc.master_seed = seed.resolve();
      auto manifest = start_manifest("convergence", rc.master_seed,
                                     {{"s0", join_doubles({rc.s0[0], rc.s0[1], rc.s0[2]})},
                                      {"eta_svd", format_double(rc.eta_svd)},
                                      {"eta_direct", format_double(rc.eta_direct)},
                                      {"target", format_double(rc.reduction_target)},
                                      {"excite", format_double(rc.excite)}});
      const ConvergenceRaceResult result = run_convergence_race(rc);
      manifest.summaries = result.summaries;
      exit_code = finish_run(io, manifest, result.records, check_convergence_race(rc, result),
                             convergence_figure(result));
    });
  }

  // ----- geodesic-map -----
  GeodesicMapConfig gc;
  {
    auto* cmd = app.add_subcommand(
        "geodesic-map", "compounded geodesic-loss gradient over a (theta, s3) grid");
    cmd->add_option("--theta-grid", gc.theta_grid, "rotation angles (rad)")->delimiter(',');
    cmd->add_option("--s3-grid", gc.s3_grid, "smallest singular values")->delimiter(',');
    add_output(cmd);
    cmd->callback([&] {
      auto manifest = start_manifest("geodesic-map", 0,
                                     {{"theta_grid", join_doubles(gc.theta_grid)},
                                      {"s3_grid", join_doubles(gc.s3_grid)}});
      const GeodesicMapResult result = run_geodesic_singularity_map(gc);
      manifest.summaries = result.summaries;
      exit_code = finish_run(io, manifest, result.records, check_geodesic_map(result),
                             geodesic_figure(result, gc));
    });
  }

  app.require_subcommand(1);
  app.parse(argc, argv);
  return exit_code;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "rotjac: SO(3) orthogonalization maps, their exact Jacobians, and deterministic "
      "Monte-Carlo harnesses"};
  app.set_version_flag("--version", std::string(kToolVersion));
  try {
    return build_and_parse(app, argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgError;
  } catch (const DomainError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitArgError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace rotjac
