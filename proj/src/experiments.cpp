#include "rotjac/experiments.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "rotjac/analysis.hpp"
#include "rotjac/jacobians.hpp"
#include "rotjac/parallel.hpp"
#include "rotjac/sampling.hpp"
#include "rotjac/so3.hpp"

namespace rotjac {

namespace {

std::uint64_t sigma_subseed(std::uint64_t master, std::size_t sigma_index) {
  return mix64(master ^ mix64(0xC0FFEEull + sigma_index));
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.samples < 1) throw DomainError("experiment: samples must be >= 1");
  for (double s : cfg.sigmas)
    if (!(s >= 0.0)) throw DomainError("experiment: sigma must be >= 0");
  if (cfg.sigmas.empty()) throw DomainError("experiment: need at least one sigma");
}

void enforce_skip_budget(std::size_t skipped, std::size_t samples, const char* what) {
  if (samples > 0 && static_cast<double>(skipped) > kSkipBudget * static_cast<double>(samples))
    throw NumericalFailure(std::string(what) + ": skipped " + std::to_string(skipped) + " of " +
                           std::to_string(samples) + " samples (budget 1%)");
}

SixDParams gs_input(const RotationMatrix& r_star, double sigma, const Mat3& noise,
                    const Mat3& m, GsInputMode mode) {
  if (mode == GsInputMode::kMatrixColumns) return SixDParams{m.col(0), m.col(1)};
  return SixDParams{r_star.matrix().col(0) + sigma * noise.col(0),
                    r_star.matrix().col(1) + sigma * noise.col(1)};
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

// ---------------------------------------------------------------------------

KappaTableResult run_kappa_table(const ExperimentConfig& cfg) {
  validate(cfg);
  KappaTableResult out;
  out.records.columns = {"sigma",      "samples",    "used",          "det_excluded",
                         "kappa_mean", "kappa_se",   "kappa_formula", "relative_error"};
  for (std::size_t k = 0; k < cfg.sigmas.size(); ++k) {
    const double sigma = cfg.sigmas[k];
    const std::uint64_t sub = sigma_subseed(cfg.master_seed, k);
    std::vector<double> kappa(cfg.samples, 0.0);
    std::vector<char> keep(cfg.samples, 0);
    parallel_for(cfg.samples, cfg.parallelism, [&](std::size_t i) {
      RngStream stream(sub, i);
      const Mat3 m = Mat3::Identity() + sigma * gaussian_matrix(stream);
      if (m.determinant() <= 0.0) return;  // conditioning, counted below
      const Vec3 s = svd3(m).s;
      kappa[i] = (s[0] + s[1]) / (s[1] + s[2]);
      keep[i] = 1;
    });
    const MeanSE stat = mean_se(kappa, keep);

    KappaRow row;
    row.sigma = sigma;
    row.samples = cfg.samples;
    row.used = stat.count;
    row.det_excluded = cfg.samples - stat.count;
    row.kappa_mean = stat.mean;
    row.kappa_se = stat.std_error;
    const double c3 = goe3_top_eigenvalue();
    if (sigma < 2.0 / c3) {
      row.formula = expected_kappa_formula(sigma).formula_value;
      if (*row.formula != 0.0)
        row.relative_error = std::abs(row.kappa_mean - *row.formula) / *row.formula;
    }
    out.rows.push_back(row);

    out.records.rows.push_back({row.sigma, static_cast<std::uint64_t>(row.samples),
                                static_cast<std::uint64_t>(row.used),
                                static_cast<std::uint64_t>(row.det_excluded), row.kappa_mean,
                                row.kappa_se, row.formula ? Cell{*row.formula} : Cell{std::string{}},
                                row.relative_error ? Cell{*row.relative_error} : Cell{std::string{}}});

    MetricSummary s;
    s.name = "kappa_mean(sigma=" + std::to_string(sigma) + ")";
    s.value = row.kappa_mean;
    s.std_error = row.kappa_se;
    s.count = row.used;
    s.prediction = row.formula;
    s.relative_error = row.relative_error;
    out.summaries.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

ProjectionErrorResult run_projection_error(const ExperimentConfig& cfg) {
  validate(cfg);
  ProjectionErrorResult out;
  out.records.columns = {"sigma",        "samples",      "used",         "skipped",
                         "svd_mse",      "svd_se",       "gs_mse",       "gs_se",
                         "raw_mse",      "raw_se",       "ratio_gs_svd", "ratio_gs_svd_se",
                         "ratio_svd_raw", "ratio_svd_raw_se", "pred_svd", "pred_gs", "pred_raw"};
  for (std::size_t k = 0; k < cfg.sigmas.size(); ++k) {
    const double sigma = cfg.sigmas[k];
    const std::uint64_t sub = sigma_subseed(cfg.master_seed, k);
    std::vector<double> svd_e(cfg.samples), gs_e(cfg.samples), raw_e(cfg.samples);
    std::vector<char> keep(cfg.samples, 0);
    parallel_for(cfg.samples, cfg.parallelism, [&](std::size_t i) {
      RngStream stream(sub, i);
      const RotationMatrix r_star = random_rotation(stream);
      const Mat3 noise = gaussian_matrix(stream);
      const Mat3 m = r_star.matrix() + sigma * noise;
      try {
        const RotationMatrix gs = gram_schmidt(gs_input(r_star, sigma, noise, m, cfg.gs_mode));
        gs_e[i] = frobenius_loss(gs.matrix(), r_star);
      } catch (const DegenerateInput&) {
        return;
      }
      svd_e[i] = frobenius_loss(svdo_plus(m).matrix(), r_star);
      raw_e[i] = frobenius_loss(m, r_star);
      keep[i] = 1;
    });

    const MeanSE svd_stat = mean_se(svd_e, keep);
    const MeanSE gs_stat = mean_se(gs_e, keep);
    const MeanSE raw_stat = mean_se(raw_e, keep);
    enforce_skip_budget(cfg.samples - svd_stat.count, cfg.samples, "projection_error");

    // Delta-method SE for ratios of correlated sample means.
    auto ratio_se = [&](const std::vector<double>& x, const MeanSE& xs,
                        const std::vector<double>& y, const MeanSE& ys) {
      if (ys.mean == 0.0 || xs.count < 2) return 0.0;
      const double n = static_cast<double>(xs.count);
      const double cov =
          (pairwise_reduce(0, cfg.samples,
                           [&](std::size_t i) { return keep[i] ? x[i] * y[i] : 0.0; }) -
           n * xs.mean * ys.mean) /
          (n - 1.0) / n;
      const double vx = xs.std_error * xs.std_error;
      const double vy = ys.std_error * ys.std_error;
      const double r = xs.mean / ys.mean;
      const double var = (vx - 2.0 * r * cov + r * r * vy) / (ys.mean * ys.mean);
      return var > 0.0 ? std::sqrt(var) : 0.0;
    };

    ProjectionErrorRow row;
    row.sigma = sigma;
    row.samples = cfg.samples;
    row.used = svd_stat.count;
    row.skipped = cfg.samples - svd_stat.count;
    row.svd_mse = svd_stat.mean;
    row.svd_se = svd_stat.std_error;
    row.gs_mse = gs_stat.mean;
    row.gs_se = gs_stat.std_error;
    row.raw_mse = raw_stat.mean;
    row.raw_se = raw_stat.std_error;
    row.ratio_gs_svd = row.svd_mse > 0.0 ? row.gs_mse / row.svd_mse : 0.0;
    row.ratio_gs_svd_se = ratio_se(gs_e, gs_stat, svd_e, svd_stat);
    row.ratio_svd_raw = row.raw_mse > 0.0 ? row.svd_mse / row.raw_mse : 0.0;
    row.ratio_svd_raw_se = ratio_se(svd_e, svd_stat, raw_e, raw_stat);
    const ProjectionErrorPrediction pred = projection_error_prediction(sigma);
    row.pred_svd = pred.svd_mse;
    row.pred_gs = pred.gs_mse;
    row.pred_raw = pred.raw_mse;
    out.rows.push_back(row);

    out.records.rows.push_back(
        {row.sigma, static_cast<std::uint64_t>(row.samples), static_cast<std::uint64_t>(row.used),
         static_cast<std::uint64_t>(row.skipped), row.svd_mse, row.svd_se, row.gs_mse, row.gs_se,
         row.raw_mse, row.raw_se, row.ratio_gs_svd, row.ratio_gs_svd_se, row.ratio_svd_raw,
         row.ratio_svd_raw_se, row.pred_svd, row.pred_gs, row.pred_raw});

    for (auto [name, value, se, pred_v] :
         {std::tuple{"svd_mse", row.svd_mse, row.svd_se, row.pred_svd},
          std::tuple{"gs_mse", row.gs_mse, row.gs_se, row.pred_gs},
          std::tuple{"raw_mse", row.raw_mse, row.raw_se, row.pred_raw}}) {
      MetricSummary s;
      s.name = std::string(name) + "(sigma=" + std::to_string(sigma) + ")";
      s.value = value;
      s.std_error = se;
      s.count = row.used;
      s.prediction = pred_v;
      if (pred_v > 0.0) s.relative_error = std::abs(value - pred_v) / pred_v;
      out.summaries.push_back(s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CoordinateDependenceResult run_coordinate_dependence(const ExperimentConfig& cfg) {
  validate(cfg);
  CoordinateDependenceResult out;
  const double sigma = cfg.sigmas.front();
  out.sigma = sigma;
  out.samples = cfg.samples;
  out.records.columns = {"sample_index", "svd_inconsistency_rad", "gs_inconsistency_rad",
                         "gs_degenerate"};

  const std::uint64_t sub = sigma_subseed(cfg.master_seed, 0);
  std::vector<double> svd_ang(cfg.samples, 0.0), gs_ang(cfg.samples, 0.0);
  std::vector<char> gs_ok(cfg.samples, 0);
  parallel_for(cfg.samples, cfg.parallelism, [&](std::size_t i) {
    RngStream stream(sub, i);
    const RotationMatrix r_star = random_rotation(stream);
    const Mat3 noise = gaussian_matrix(stream);
    const Mat3 m = r_star.matrix() + sigma * noise;
    const RotationMatrix r2 = random_rotation(stream);
    const Mat3 mr2 = m * r2.matrix();

    const RotationMatrix a = svdo_plus(m);
    const RotationMatrix b(svdo_plus(mr2).matrix() * r2.matrix().transpose());
    svd_ang[i] = geodesic_distance(b, a);
    try {
      const RotationMatrix ga = gram_schmidt(SixDParams{m.col(0), m.col(1)});
      const RotationMatrix gb(
          gram_schmidt(SixDParams{mr2.col(0), mr2.col(1)}).matrix() * r2.matrix().transpose());
      gs_ang[i] = geodesic_distance(gb, ga);
      gs_ok[i] = 1;
    } catch (const DegenerateInput&) {
    }
  });

  std::vector<double> gs_sorted;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    out.svd_max = std::max(out.svd_max, svd_ang[i]);
    const double svd_deg = svd_ang[i] * 180.0 / M_PI;
    ++out.svd_histogram[std::min<std::size_t>(179, static_cast<std::size_t>(svd_deg))];
    if (gs_ok[i]) {
      gs_sorted.push_back(gs_ang[i]);
      const double gs_deg = gs_ang[i] * 180.0 / M_PI;
      ++out.gs_histogram[std::min<std::size_t>(179, static_cast<std::size_t>(gs_deg))];
    } else {
      ++out.gs_skipped;
    }
    out.records.rows.push_back({static_cast<std::uint64_t>(i), svd_ang[i],
                                gs_ok[i] ? Cell{gs_ang[i]} : Cell{std::string{}},
                                static_cast<std::int64_t>(gs_ok[i] ? 0 : 1)});
  }
  enforce_skip_budget(out.gs_skipped, cfg.samples, "coordinate_dependence");
  std::sort(gs_sorted.begin(), gs_sorted.end());
  out.gs_q25 = quantile_sorted(gs_sorted, 0.25);
  out.gs_median = quantile_sorted(gs_sorted, 0.5);
  out.gs_q75 = quantile_sorted(gs_sorted, 0.75);

  out.summaries = {
      {"svd_inconsistency_max", out.svd_max, 0.0, cfg.samples, std::nullopt, std::nullopt},
      {"gs_inconsistency_median", out.gs_median, 0.0, gs_sorted.size(), std::nullopt,
       std::nullopt},
      {"gs_inconsistency_q25", out.gs_q25, 0.0, gs_sorted.size(), std::nullopt, std::nullopt},
      {"gs_inconsistency_q75", out.gs_q75, 0.0, gs_sorted.size(), std::nullopt, std::nullopt},
  };
  return out;
}

// ---------------------------------------------------------------------------

PerColumnResult run_per_column_error(const ExperimentConfig& cfg) {
  validate(cfg);
  PerColumnResult out;
  out.records.columns = {"sigma",    "samples",  "used",     "skipped",
                         "gs_rms_1", "gs_se_1",  "gs_rms_2", "gs_se_2",  "gs_rms_3", "gs_se_3",
                         "svd_rms_1", "svd_se_1", "svd_rms_2", "svd_se_2", "svd_rms_3", "svd_se_3"};
  for (std::size_t k = 0; k < cfg.sigmas.size(); ++k) {
    const double sigma = cfg.sigmas[k];
    const std::uint64_t sub = sigma_subseed(cfg.master_seed, k);
    std::array<std::vector<double>, 3> gs_sq, svd_sq;
    for (int c = 0; c < 3; ++c) {
      gs_sq[c].assign(cfg.samples, 0.0);
      svd_sq[c].assign(cfg.samples, 0.0);
    }
    std::vector<char> keep(cfg.samples, 0);
    parallel_for(cfg.samples, cfg.parallelism, [&](std::size_t i) {
      RngStream stream(sub, i);
      const RotationMatrix r_star = random_rotation(stream);
      const Mat3 noise = gaussian_matrix(stream);
      const Mat3 m = r_star.matrix() + sigma * noise;
      Mat3 gs;
      try {
        gs = gram_schmidt(gs_input(r_star, sigma, noise, m, cfg.gs_mode)).matrix();
      } catch (const DegenerateInput&) {
        return;
      }
      const Mat3 svd = svdo_plus(m).matrix();
      for (int c = 0; c < 3; ++c) {
        gs_sq[c][i] = (gs.col(c) - r_star.matrix().col(c)).squaredNorm();
        svd_sq[c][i] = (svd.col(c) - r_star.matrix().col(c)).squaredNorm();
      }
      keep[i] = 1;
    });

    PerColumnRow row;
    row.sigma = sigma;
    row.samples = cfg.samples;
    for (int c = 0; c < 3; ++c) {
      const MeanSE g = mean_se(gs_sq[c], keep);
      const MeanSE v = mean_se(svd_sq[c], keep);
      row.used = g.count;
      row.gs_rms[c] = std::sqrt(g.mean);
      row.svd_rms[c] = std::sqrt(v.mean);
      // Delta method: se(sqrt(m)) = se(m) / (2 sqrt(m)).
      row.gs_rms_se[c] = g.mean > 0.0 ? g.std_error / (2.0 * row.gs_rms[c]) : 0.0;
      row.svd_rms_se[c] = v.mean > 0.0 ? v.std_error / (2.0 * row.svd_rms[c]) : 0.0;
    }
    row.skipped = cfg.samples - row.used;
    enforce_skip_budget(row.skipped, cfg.samples, "per_column_error");
    out.rows.push_back(row);

    out.records.rows.push_back(
        {row.sigma, static_cast<std::uint64_t>(row.samples), static_cast<std::uint64_t>(row.used),
         static_cast<std::uint64_t>(row.skipped), row.gs_rms[0], row.gs_rms_se[0], row.gs_rms[1],
         row.gs_rms_se[1], row.gs_rms[2], row.gs_rms_se[2], row.svd_rms[0], row.svd_rms_se[0],
         row.svd_rms[1], row.svd_rms_se[1], row.svd_rms[2], row.svd_rms_se[2]});
    for (int c = 0; c < 3; ++c) {
      out.summaries.push_back({"gs_rms_col" + std::to_string(c + 1) + "(sigma=" +
                                   std::to_string(sigma) + ")",
                               row.gs_rms[c], row.gs_rms_se[c], row.used, std::nullopt,
                               std::nullopt});
      out.summaries.push_back({"svd_rms_col" + std::to_string(c + 1) + "(sigma=" +
                                   std::to_string(sigma) + ")",
                               row.svd_rms[c], row.svd_rms_se[c], row.used, std::nullopt,
                               std::nullopt});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

GradientScatterResult run_gradient_scatter(const ExperimentConfig& cfg) {
  validate(cfg);
  GradientScatterResult out;
  const double sigma = cfg.sigmas.front();
  out.sigma = sigma;
  out.samples = cfg.samples;
  out.records.columns = {"sample_index", "error_e",  "grad_direct",    "grad_svd",
                         "grad_gs",      "delta_gap", "svd_degenerate", "gs_degenerate"};

  const std::uint64_t sub = sigma_subseed(cfg.master_seed, 0);
  struct Row {
    double e, gd, gsvd, ggs, gap;
    char svd_bad, gs_bad;
  };
  std::vector<Row> rows(cfg.samples);
  parallel_for(cfg.samples, cfg.parallelism, [&](std::size_t i) {
    RngStream stream(sub, i);
    const RotationMatrix r_star = random_rotation(stream);
    const Mat3 noise = gaussian_matrix(stream);
    const Mat3 m = r_star.matrix() + sigma * noise;
    Row& row = rows[i];
    row.e = m(0, 0) - r_star(0, 0);
    row.gd = 2.0 * row.e;
    const SvdFactors f = svd3(m);
    row.gap = singular_value_gap_from(f.s, f.det_sign);
    row.svd_bad = row.gs_bad = 0;
    row.gsvd = row.ggs = 0.0;
    try {
      const Mat3 grad_r = 2.0 * (svdo_plus(f).matrix() - r_star.matrix());
      row.gsvd = svd_backward(m, grad_r)(0, 0);
    } catch (const NearDegenerateSpectrum&) {
      row.svd_bad = 1;
    }
    try {
      const SixDParams t = gs_input(r_star, sigma, noise, m, cfg.gs_mode);
      const Vec9 grad_r = 2.0 * flatten(gram_schmidt(t).matrix() - r_star.matrix());
      row.ggs = (gs_jacobian(t).transpose() * grad_r)[0];
    } catch (const DegenerateInput&) {
      row.gs_bad = 1;
    }
  });

  std::size_t svd_used = 0, svd_dis = 0, gs_used = 0, gs_dis = 0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const Row& row = rows[i];
    if (row.svd_bad) ++out.svd_degenerate;
    else {
      ++svd_used;
      if (sign_of(row.gsvd) * sign_of(row.e) < 0) ++svd_dis;
    }
    if (row.gs_bad) ++out.gs_degenerate;
    else {
      ++gs_used;
      if (sign_of(row.ggs) * sign_of(row.e) < 0) ++gs_dis;
    }
    if (row.gd != 2.0 * row.e) out.direct_gradient_exact = false;
    out.records.rows.push_back({static_cast<std::uint64_t>(i), row.e, row.gd,
                                row.svd_bad ? Cell{std::string{}} : Cell{row.gsvd},
                                row.gs_bad ? Cell{std::string{}} : Cell{row.ggs}, row.gap,
                                static_cast<std::int64_t>(row.svd_bad),
                                static_cast<std::int64_t>(row.gs_bad)});
  }
  out.svd_sign_disagreement =
      svd_used ? static_cast<double>(svd_dis) / static_cast<double>(svd_used) : 0.0;
  out.gs_sign_disagreement =
      gs_used ? static_cast<double>(gs_dis) / static_cast<double>(gs_used) : 0.0;
  enforce_skip_budget(out.svd_degenerate + out.gs_degenerate, 2 * cfg.samples,
                      "gradient_scatter");

  out.summaries = {
      {"svd_sign_disagreement", out.svd_sign_disagreement, 0.0, svd_used, std::nullopt,
       std::nullopt},
      {"gs_sign_disagreement", out.gs_sign_disagreement, 0.0, gs_used, std::nullopt,
       std::nullopt},
      {"svd_degenerate", static_cast<double>(out.svd_degenerate), 0.0, cfg.samples, std::nullopt,
       std::nullopt},
      {"gs_degenerate", static_cast<double>(out.gs_degenerate), 0.0, cfg.samples, std::nullopt,
       std::nullopt},
  };
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::array<double, 3> pair_components(const RotationMatrix& r_star, const Mat3& m) {
  const Mat3 e = r_star.matrix().transpose() * m;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return {(e(0, 1) - e(1, 0)) * inv_sqrt2, (e(0, 2) - e(2, 0)) * inv_sqrt2,
          (e(1, 2) - e(2, 1)) * inv_sqrt2};
}

}  // namespace

ConvergenceRaceResult run_convergence_race(const ConvergenceRaceConfig& cfg) {
  if (!(cfg.s0[0] > 0.0 && cfg.s0[1] > 0.0 && cfg.s0[2] > 0.0))
    throw DomainError("convergence_race: s0 must be positive");
  if (!(cfg.eta_direct > 0.0) || !(cfg.eta_svd > 0.0))
    throw DomainError("convergence_race: step sizes must be positive");
  if (!(cfg.reduction_target > 1.0))
    throw DomainError("convergence_race: reduction target must exceed 1");

  ConvergenceRaceResult out;
  out.records.columns = {"method", "iteration", "loss", "c12", "c13", "c23"};

  RngStream stream(cfg.master_seed, 0);
  const RotationMatrix r_star = random_rotation(stream);

  // Start at R* diag(s0) nudged along the three pair directions; that point
  // has singular values s0 + O(excite^2) and excites every active
  // eigendirection of the projection-loss Hessian. The unperturbed canonical
  // start is itself a stationary point of the projection loss.
  Mat3 g_exc = Mat3::Zero();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    g_exc(i, j) += inv_sqrt2;
    g_exc(j, i) -= inv_sqrt2;
  }
  const Mat3 m0 =
      r_star.matrix() * (Vec3(cfg.s0).asDiagonal().toDenseMatrix() + cfg.excite * g_exc);

  const double target = 1.0 / cfg.reduction_target;
  Vec3 s_sorted = cfg.s0;
  std::sort(s_sorted.data(), s_sorted.data() + 3, std::greater<double>());
  for (int p = 0; p < 3; ++p) {
    static constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    const double lam =
        4.0 / std::pow(s_sorted[kPairs[p][0]] + s_sorted[kPairs[p][1]], 2.0);
    out.rate_formula[p] = std::abs(1.0 - cfg.eta_svd * lam);
    out.rate_hessian[p] = std::abs(1.0 - 2.0 * cfg.eta_svd * lam);
  }

  auto race = [&](const std::string& method, double eta,
                  const std::function<Mat3(const Mat3&)>& gradient) {
    RaceOutcome res;
    res.method = method;
    res.eta = eta;
    Mat3 m = m0;
    const std::array<double, 3> c0 = pair_components(r_star, m);
    std::array<std::size_t, 3> reached_at{0, 0, 0};
    std::array<bool, 3> reached{false, false, false};
    double loss0 = 0.0;
    for (std::size_t it = 0; it <= cfg.max_iterations; ++it) {
      const double loss = method == "direct" ? frobenius_loss(m, r_star)
                                             : frobenius_loss(svdo_plus(m).matrix(), r_star);
      if (it == 0) loss0 = loss;
      const std::array<double, 3> c = pair_components(r_star, m);
      out.records.rows.push_back({method, static_cast<std::uint64_t>(it), loss,
                                  std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
      for (int p = 0; p < 3; ++p)
        if (!reached[p] && std::abs(c[p]) <= target * std::abs(c0[p])) {
          reached[p] = true;
          reached_at[p] = it;
          res.measured_rate[p] =
              it > 0 ? std::pow(std::abs(c[p]) / std::abs(c0[p]), 1.0 / static_cast<double>(it))
                     : 0.0;
        }
      res.final_loss = loss;
      if (reached[0] && reached[1] && reached[2]) {
        res.reached = true;
        break;
      }
      if (loss > 10.0 * loss0 && loss0 > 0.0) {
        res.diverged = true;
        break;
      }
      if (it == cfg.max_iterations) break;
      try {
        m -= eta * gradient(m);
      } catch (const NearDegenerateSpectrum&) {
        res.hit_degeneracy = true;
        break;
      }
    }
    res.iterations_per_pair = reached_at;
    res.slowest_iterations = *std::max_element(reached_at.begin(), reached_at.end());
    return res;
  };

  out.direct = race("direct", cfg.eta_direct,
                    [&](const Mat3& m) { return Mat3(2.0 * (m - r_star.matrix())); });
  out.svd = race("svd_train", cfg.eta_svd, [&](const Mat3& m) {
    return svd_backward(m, 2.0 * (svdo_plus(m).matrix() - r_star.matrix()));
  });

  for (const RaceOutcome* o : {&out.direct, &out.svd}) {
    MetricSummary s;
    s.name = o->method + "_slowest_iterations";
    s.value = static_cast<double>(o->slowest_iterations);
    s.count = 1;
    out.summaries.push_back(s);
  }
  for (int p = 0; p < 3; ++p) {
    MetricSummary s;
    s.name = "svd_measured_rate_pair" + std::to_string(p);
    s.value = out.svd.measured_rate[p];
    s.count = 1;
    s.prediction = out.rate_hessian[p];
    if (out.rate_hessian[p] != 0.0)
      s.relative_error = std::abs(s.value - out.rate_hessian[p]) / out.rate_hessian[p];
    out.summaries.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

GeodesicMapResult run_geodesic_singularity_map(const GeodesicMapConfig& cfg) {
  for (double theta : cfg.theta_grid)
    if (!(theta > 1e-3 && theta < M_PI - 1e-3))
      throw DomainError("geodesic map: theta grid outside (1e-3, pi - 1e-3)");
  for (double s3 : cfg.s3_grid)
    if (!(s3 > 1e-3 && s3 <= 1.0)) throw DomainError("geodesic map: s3 grid outside (1e-3, 1]");

  GeodesicMapResult out;
  out.records.columns = {"theta",       "s3",           "compounded_norm", "bound",
                         "r_grad_norm", "direct_grad_norm", "skipped"};
  const RotationMatrix r_star = RotationMatrix::identity();
  const Vec3 axis = Vec3(1.0, 1.0, 1.0).normalized();
  for (double theta : cfg.theta_grid)
    for (double s3 : cfg.s3_grid) {
      ++out.points;
      const Mat3 m = Eigen::AngleAxisd(theta, axis).toRotationMatrix() *
                     Vec3(1.0, 1.0, s3).asDiagonal().toDenseMatrix();
      const double r_grad_norm = std::sqrt(3.0) / (2.0 * std::sin(theta));
      const double direct_norm = 2.0 * (m - Mat3::Identity()).norm();
      try {
        const CompoundedGradient cg = compounded_gradient_norm(m, r_star);
        if (cg.norm > cg.bound + 1e-9) out.all_within_bound = false;
        out.records.rows.push_back({theta, s3, cg.norm, cg.bound, r_grad_norm, direct_norm,
                                    static_cast<std::int64_t>(0)});
      } catch (const NearDegenerateSpectrum&) {
        ++out.skipped;
        out.records.rows.push_back({theta, s3, std::string{}, std::string{}, r_grad_norm,
                                    direct_norm, static_cast<std::int64_t>(1)});
      } catch (const AngleSingularity&) {
        ++out.skipped;
        out.records.rows.push_back({theta, s3, std::string{}, std::string{}, r_grad_norm,
                                    direct_norm, static_cast<std::int64_t>(1)});
      }
    }
  out.summaries = {{"points", static_cast<double>(out.points), 0.0, out.points, std::nullopt,
                    std::nullopt},
                   {"skipped", static_cast<double>(out.skipped), 0.0, out.points, std::nullopt,
                    std::nullopt},
                   {"all_within_bound", out.all_within_bound ? 1.0 : 0.0, 0.0, out.points,
                    std::nullopt, std::nullopt}};
  return out;
}

// ---------------------------------------------------------------------------

JacobianCheckResult run_jacobian_check(const JacobianCheckConfig& cfg) {
  if (cfg.trials < 1) throw DomainError("jacobian_check: trials must be >= 1");
  JacobianCheckResult out;
  out.trials = cfg.trials;
  out.records.columns = {"trial", "det_sign", "gap", "svd_max_dev", "gs_max_dev"};

  struct Row {
    int det_sign;
    double gap, dev_svd, dev_gs;
  };
  std::vector<Row> rows(cfg.trials);
  parallel_for(cfg.trials, cfg.parallelism, [&](std::size_t i) {
    RngStream stream(cfg.master_seed, i);

    // Draw until the trial matrix is safely inside one branch: the FD stencil
    // must not straddle a det sign change or a gap degeneracy.
    Mat3 m;
    SvdFactors f;
    double gap = 0.0;
    do {
      m = gaussian_matrix(stream);
      f = svd3(m);
      gap = singular_value_gap_from(f.s, f.det_sign);
    } while (gap < 0.1 || std::abs(m.determinant()) < 1e-3);

    const Jacobian9x9 analytic = svd_jacobian(m);
    const auto fd_fn = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return flatten(svdo_plus(unflatten(Vec9(x))).matrix());
    };
    const Eigen::MatrixXd fd = finite_difference_jacobian(fd_fn, Vec9(flatten(m)), cfg.fd_step);
    rows[i].det_sign = f.det_sign;
    rows[i].gap = gap;
    rows[i].dev_svd = (analytic - fd).cwiseAbs().maxCoeff();

    SixDParams p;
    double nu = 0.0;
    do {
      for (int k = 0; k < 3; ++k) p.t1[k] = stream.next_gaussian();
      for (int k = 0; k < 3; ++k) p.t2[k] = stream.next_gaussian();
      const double n1 = p.t1.norm();
      if (n1 < 0.2) continue;
      const Vec3 r1 = p.t1 / n1;
      nu = (p.t2 - r1.dot(p.t2) * r1).norm();
    } while (nu < 0.2);

    const Jacobian9x6 ganalytic = gs_jacobian(p);
    const auto gs_fn = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      const SixDParams q{Vec3(x[0], x[1], x[2]), Vec3(x[3], x[4], x[5])};
      return flatten(gram_schmidt(q).matrix());
    };
    Vec6 x0;
    x0 << p.t1, p.t2;
    const Eigen::MatrixXd gfd = finite_difference_jacobian(gs_fn, x0, cfg.fd_step);
    rows[i].dev_gs = (ganalytic - gfd).cwiseAbs().maxCoeff();
  });

  for (std::size_t i = 0; i < cfg.trials; ++i) {
    out.max_dev_svd = std::max(out.max_dev_svd, rows[i].dev_svd);
    out.max_dev_gs = std::max(out.max_dev_gs, rows[i].dev_gs);
    out.records.rows.push_back({static_cast<std::uint64_t>(i),
                                static_cast<std::int64_t>(rows[i].det_sign), rows[i].gap,
                                rows[i].dev_svd, rows[i].dev_gs});
  }
  out.summaries = {
      {"svd_fd_max_deviation", out.max_dev_svd, 0.0, cfg.trials, std::nullopt, std::nullopt},
      {"gs_fd_max_deviation", out.max_dev_gs, 0.0, cfg.trials, std::nullopt, std::nullopt}};
  return out;
}

}  // namespace rotjac
