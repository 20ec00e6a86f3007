#include "rotjac/assertions.hpp"

#include <cmath>
#include <sstream>

#include "rotjac/analysis.hpp"

namespace rotjac {

namespace {

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

std::string fmt(double v) { return format_double(v); }

AssertionResult make(const std::string& name, bool pass, const std::string& detail) {
  return AssertionResult{name, pass, detail};
}

}  // namespace

std::vector<AssertionResult> check_kappa_table(const KappaTableResult& result) {
  std::vector<AssertionResult> out;
  for (const auto& row : result.rows) {
    std::ostringstream tag;
    tag << "kappa(sigma=" << row.sigma << ")";
    if (row.formula && row.sigma <= 0.3 + 1e-9) {
      const double tol = near(row.sigma, 0.2) ? 0.006 : 0.01;
      const double allow = tol + 3.0 * row.kappa_se / *row.formula;
      out.push_back(make(tag.str() + " vs formula",
                         row.relative_error && *row.relative_error <= allow,
                         "relative error " + fmt(row.relative_error.value_or(-1.0)) +
                             " (allowed " + fmt(allow) + ")"));
    }
    const double ref = near(row.sigma, 0.5) ? 1.947 : (near(row.sigma, 0.7) ? 2.160 : 0.0);
    if (ref > 0.0) {
      const double rel = std::abs(row.kappa_mean - ref) / ref;
      const double allow = 0.03 + 3.0 * row.kappa_se / ref;
      out.push_back(make(tag.str() + " vs reference " + fmt(ref), rel <= allow,
                         "mean " + fmt(row.kappa_mean) + ", relative deviation " + fmt(rel)));
    }
  }
  return out;
}

std::vector<AssertionResult> check_projection_error(const ProjectionErrorResult& result) {
  std::vector<AssertionResult> out;
  for (const auto& row : result.rows) {
    if (row.sigma <= 0.0 || row.used < 2) continue;
    std::ostringstream tag;
    tag << "(sigma=" << row.sigma << ")";
    if (row.sigma <= 0.1 + 1e-9) {
      const double allow = 3.0 * row.ratio_gs_svd_se;
      out.push_back(make("gs/svd ratio in [1.9, 2.1] " + tag.str(),
                         row.ratio_gs_svd >= 1.9 - allow && row.ratio_gs_svd <= 2.1 + allow,
                         "ratio " + fmt(row.ratio_gs_svd) + " +- " + fmt(row.ratio_gs_svd_se)));
    }
    if (row.sigma <= 0.011) {
      const double allow = 3.0 * row.ratio_svd_raw_se;
      out.push_back(make("svd/raw ratio in [0.31, 0.36] " + tag.str(),
                         row.ratio_svd_raw >= 0.31 - allow && row.ratio_svd_raw <= 0.36 + allow,
                         "ratio " + fmt(row.ratio_svd_raw) + " +- " + fmt(row.ratio_svd_raw_se)));
    }
  }
  return out;
}

std::vector<AssertionResult> check_coordinate_dependence(
    const CoordinateDependenceResult& result) {
  std::vector<AssertionResult> out;
  out.push_back(make("svd inconsistency max < 1e-8 rad", result.svd_max < 1e-8,
                     "max " + fmt(result.svd_max)));
  if (result.sigma >= 0.49) {
    out.push_back(make("gs inconsistency median > 0.1 rad", result.gs_median > 0.1,
                       "median " + fmt(result.gs_median)));
  }
  return out;
}

std::vector<AssertionResult> check_per_column(const PerColumnResult& result) {
  std::vector<AssertionResult> out;
  for (const auto& row : result.rows) {
    if (row.sigma < 0.3 || row.used < 100) continue;
    std::ostringstream tag;
    tag << "(sigma=" << row.sigma << ")";
    bool increasing = true;
    double weakest_gap_in_se = INFINITY;
    for (int c = 0; c < 2; ++c) {
      const double gap = row.gs_rms[c + 1] - row.gs_rms[c];
      const double se = std::hypot(row.gs_rms_se[c + 1], row.gs_rms_se[c]);
      if (se > 0.0) weakest_gap_in_se = std::min(weakest_gap_in_se, gap / se);
      if (gap <= 3.0 * se) increasing = false;
    }
    out.push_back(make("gs column rms strictly increasing (>3 se) " + tag.str(), increasing,
                       "rms " + fmt(row.gs_rms[0]) + ", " + fmt(row.gs_rms[1]) + ", " +
                           fmt(row.gs_rms[2]) + "; weakest gap " + fmt(weakest_gap_in_se) +
                           " se"));

    const double lo = std::min({row.svd_rms[0], row.svd_rms[1], row.svd_rms[2]});
    const double hi = std::max({row.svd_rms[0], row.svd_rms[1], row.svd_rms[2]});
    const double se_allow =
        3.0 * std::max({row.svd_rms_se[0], row.svd_rms_se[1], row.svd_rms_se[2]});
    out.push_back(make("svd column rms pairwise within 2% " + tag.str(),
                       lo > 0.0 && (hi - lo) <= 0.02 * lo + se_allow,
                       "spread " + fmt(lo > 0.0 ? (hi - lo) / lo : 0.0)));

    bool svd_below = true;
    for (int c = 0; c < 3; ++c) {
      const double se = std::hypot(row.gs_rms_se[c], row.svd_rms_se[c]);
      if (!(row.svd_rms[c] < row.gs_rms[c] + 3.0 * se)) svd_below = false;
    }
    out.push_back(make("svd rms below gs rms per column " + tag.str(), svd_below,
                       "svd " + fmt(row.svd_rms[0]) + "/" + fmt(row.svd_rms[1]) + "/" +
                           fmt(row.svd_rms[2]) + " vs gs " + fmt(row.gs_rms[0]) + "/" +
                           fmt(row.gs_rms[1]) + "/" + fmt(row.gs_rms[2])));
  }
  return out;
}

std::vector<AssertionResult> check_gradient_scatter(const GradientScatterResult& result) {
  std::vector<AssertionResult> out;
  out.push_back(make("direct gradient equals 2*error exactly", result.direct_gradient_exact,
                     result.direct_gradient_exact ? "all samples" : "mismatch found"));
  if (result.sigma >= 0.49) {
    out.push_back(make("svd-train sign disagreement > 0",
                       result.svd_sign_disagreement > 0.0,
                       "fraction " + fmt(result.svd_sign_disagreement)));
  }
  return out;
}

std::vector<AssertionResult> check_convergence_race(const ConvergenceRaceConfig& cfg,
                                                    const ConvergenceRaceResult& result) {
  std::vector<AssertionResult> out;
  const auto outcome_note = [](const RaceOutcome& o) {
    if (o.diverged) return std::string("diverged");
    if (o.hit_degeneracy) return std::string("hit the refused gap region");
    return "slowest pair: " + std::to_string(o.slowest_iterations) + " iterations";
  };
  out.push_back(make("direct run converged", result.direct.reached && !result.direct.diverged,
                     outcome_note(result.direct)));
  out.push_back(make("svd run converged",
                     result.svd.reached && !result.svd.diverged && !result.svd.hit_degeneracy,
                     outcome_note(result.svd)));

  if (near(cfg.eta_direct, 0.5, 1e-12)) {
    out.push_back(make("direct eta=0.5 one-step convergence, loss < 1e-20",
                       result.direct.slowest_iterations <= 1 &&
                           result.direct.final_loss < 1e-20,
                       "loss " + fmt(result.direct.final_loss) + " after " +
                           std::to_string(result.direct.slowest_iterations) + " iterations"));
  }
  if (near(cfg.eta_direct, 0.49, 1e-12)) {
    out.push_back(make("direct eta=0.49 reaches target in <= 3 iterations",
                       result.direct.reached && result.direct.slowest_iterations <= 3,
                       std::to_string(result.direct.slowest_iterations) + " iterations"));
  }
  if ((cfg.s0 - Vec3(3.0, 1.0, 0.1)).norm() < 1e-12 && near(cfg.eta_svd, 0.3, 1e-12) &&
      near(cfg.reduction_target, 100.0, 1e-9)) {
    // Tabulated-rate figure for this configuration. The measured dynamics of
    // the squared-Frobenius loss contract at |1 - 2 eta lambda| per pair, so
    // the slowest component is the overshooting (2,3) pair, not the (1,2)
    // pair the 59-iteration figure assumes; the check is kept as stated and
    // the measured count is reported alongside both rate models.
    out.push_back(make(
        "svd eta=0.3 slowest component 100x in 59 +- 2 iterations",
        result.svd.reached && result.svd.slowest_iterations >= 57 &&
            result.svd.slowest_iterations <= 61,
        "measured " + std::to_string(result.svd.slowest_iterations) +
            " iterations; per-pair measured rates " + fmt(result.svd.measured_rate[0]) + "/" +
            fmt(result.svd.measured_rate[1]) + "/" + fmt(result.svd.measured_rate[2]) +
            ", tabulated model " + fmt(result.rate_formula[0]) + "/" +
            fmt(result.rate_formula[1]) + "/" + fmt(result.rate_formula[2]) +
            ", exact-Hessian model " + fmt(result.rate_hessian[0]) + "/" +
            fmt(result.rate_hessian[1]) + "/" + fmt(result.rate_hessian[2])));
  }
  if (result.svd.reached) {
    bool rates_match = true;
    std::ostringstream detail;
    for (int p = 0; p < 3; ++p) {
      if (result.svd.iterations_per_pair[p] < 10) continue;  // too few steps to fit a rate
      const double err = std::abs(result.svd.measured_rate[p] - result.rate_hessian[p]);
      detail << fmt(result.svd.measured_rate[p]) << " vs " << fmt(result.rate_hessian[p]) << "; ";
      if (err > 0.01 + 0.02 * result.rate_hessian[p]) rates_match = false;
    }
    out.push_back(make("svd measured rates match exact-Hessian model", rates_match,
                       detail.str().empty() ? "all pairs converged in < 10 steps" : detail.str()));
  }
  return out;
}

std::vector<AssertionResult> check_geodesic_map(const GeodesicMapResult& result) {
  return {make("compounded norm <= bound + 1e-9 at every grid point", result.all_within_bound,
               std::to_string(result.points) + " points"),
          make("no grid point skipped", result.skipped == 0,
               std::to_string(result.skipped) + " skipped")};
}

std::vector<AssertionResult> check_jacobian_check(const JacobianCheckResult& result) {
  return {make("svd jacobian vs central differences < 1e-5", result.max_dev_svd < 1e-5,
               "max deviation " + fmt(result.max_dev_svd)),
          make("gs jacobian vs central differences < 1e-5", result.max_dev_gs < 1e-5,
               "max deviation " + fmt(result.max_dev_gs))};
}

}  // namespace rotjac
