// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any criterion
// fails. The rotjac binary path is taken from argv[1] (used by the
// determinism criterion, which drives the real CLI).

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rotjac/analysis.hpp"
#include "rotjac/experiments.hpp"
#include "rotjac/jacobians.hpp"
#include "rotjac/rng.hpp"
#include "rotjac/sampling.hpp"
#include "rotjac/so3.hpp"

using namespace rotjac;

namespace {

constexpr std::uint64_t kSeed = 20250809;

struct Criterion {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Criterion> g_results;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  g_results.push_back({id, name, pass, detail});
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name << "\n"
            << "        " << detail << "\n";
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

Mat3 draw_regular(RngStream& stream, bool need_flipped_regular = false) {
  for (;;) {
    const Mat3 m = gaussian_matrix(stream);
    const SvdFactors f = svd3(m);
    if (singular_value_gap_from(f.s, f.det_sign) < 0.1) continue;
    if (std::abs(m.determinant()) < 1e-3) continue;
    if (need_flipped_regular && singular_value_gap_from(f.s, -f.det_sign) < 0.1) continue;
    return m;
  }
}

Eigen::VectorXd numerical_spectrum(const Jacobian9x9& j) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(j).singularValues();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

void criterion_1_jacobian_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  JacobianCheckConfig cfg;
  cfg.trials = 1000;
  cfg.master_seed = kSeed;
  cfg.parallelism = 0;
  const JacobianCheckResult res = run_jacobian_check(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = res.max_dev_svd < 1e-5 && res.max_dev_gs < 1e-5 && secs < 10.0;
  report(1, "analytic Jacobians match central differences (h=1e-6) within 1e-5", pass,
         "svd max dev " + fmt(res.max_dev_svd) + ", gs max dev " + fmt(res.max_dev_gs) +
             ", 1000 trials each (mixed det signs, gap >= 0.1), " + fmt(secs) + " s");
}

void criterion_2_spectrum() {
  RngStream stream(kSeed + 1);
  double dev_closed_form = 0.0;   // vs the branch-aware closed form
  double dev_plus_form_neg = 0.0; // vs 2/(si+sj) also for det < 0
  double dev_pair_identity = 0.0; // vs the spectrum of M * diag(1,1,-1)
  for (int t = 0; t < 1000; ++t) {
    const Mat3 m = draw_regular(stream, /*need_flipped_regular=*/true);
    const SvdFactors f = svd3(m);
    const Eigen::VectorXd sv = numerical_spectrum(svd_jacobian(m));
    const Vec3 closed = svd_jacobian_spectrum(m).nonzero_singular_values;
    Vec3 plus_form;
    plus_form << 2.0 / (f.s[1] + f.s[2]), 2.0 / (f.s[0] + f.s[2]), 2.0 / (f.s[0] + f.s[1]);
    for (int i = 0; i < 3; ++i) {
      dev_closed_form = std::max(dev_closed_form, std::abs(sv[i] - closed[i]));
      dev_plus_form_neg = std::max(dev_plus_form_neg, std::abs(sv[i] - plus_form[i]));
    }
    for (int i = 3; i < 9; ++i) {
      dev_closed_form = std::max(dev_closed_form, sv[i]);
      dev_plus_form_neg = std::max(dev_plus_form_neg, sv[i]);
    }
    Mat3 flipped = m;
    flipped.col(2) = -flipped.col(2);
    const Eigen::VectorXd sv_flipped = numerical_spectrum(svd_jacobian(flipped));
    dev_pair_identity = std::max(dev_pair_identity, (sv - sv_flipped).cwiseAbs().maxCoeff());
  }
  const bool stated = dev_plus_form_neg <= 1e-9 && dev_pair_identity <= 1e-9;
  report(2,
         "9x9 spectrum equals {2/(si+sj)} u {0}^6 for both det signs; identical for "
         "(M, M*diag(1,1,-1)) pairs",
         stated,
         "as stated: max dev vs 2/(si+sj) " + fmt(dev_plus_form_neg) +
             ", max pair-spectrum dev " + fmt(dev_pair_identity) +
             " (the det<0 branch of the map genuinely has denominators {s1+s2, s1-s3, s2-s3}; "
             "against that branch-aware closed form the max dev is " +
             fmt(dev_closed_form) + " <= 1e-9, finite-difference-verified by criterion 1)");
}

void criterion_3_gir() {
  RngStream stream(kSeed + 2);
  const Mat3 r = random_rotation(stream).matrix();
  const Jacobian9x9 j = svd_jacobian(r);
  const double analytic = gradient_info_retention(j);
  double pull = 0.0, mag = 0.0;
  for (int t = 0; t < 100000; ++t) {
    Vec9 g;
    for (int k = 0; k < 9; ++k) g[k] = stream.next_gaussian();
    pull += (j.transpose() * g).squaredNorm();
    mag += g.squaredNorm();
  }
  const double mc = pull / mag;
  const double rel = std::abs(mc - analytic) / analytic;
  const bool pass = std::abs(analytic - 1.0 / 3.0) <= 1e-9 && rel <= 0.01;
  report(3, "gradient information retention is 1/3 on SO(3); Monte-Carlo agrees within 1%",
         pass,
         "analytic " + fmt(analytic) + " (|dev from 1/3| " + fmt(std::abs(analytic - 1.0 / 3.0)) +
             "), Monte-Carlo " + fmt(mc) + " (rel dev " + fmt(rel) + ", 1e5 gradients)");
}

void criterion_4_kappa_table() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.sigmas = {0.05, 0.1, 0.2, 0.3, 0.5, 0.7};
  cfg.samples = 50000;
  cfg.master_seed = kSeed + 3;
  cfg.parallelism = 0;
  const KappaTableResult res = run_kappa_table(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double tol_small[4] = {0.01, 0.01, 0.006, 0.01};
  bool pass = secs < 60.0;
  std::string detail;
  for (int i = 0; i < 4; ++i) {
    const double rel = res.rows[i].relative_error.value_or(1.0);
    if (rel > tol_small[i]) pass = false;
    detail += "s=" + fmt(res.rows[i].sigma) + " rel " + fmt(rel) + "; ";
  }
  const double ref[2] = {1.947, 2.160};
  for (int i = 0; i < 2; ++i) {
    const double rel = std::abs(res.rows[4 + i].kappa_mean - ref[i]) / ref[i];
    if (rel > 0.03) pass = false;
    detail += "s=" + fmt(res.rows[4 + i].sigma) + " mean " + fmt(res.rows[4 + i].kappa_mean) +
              " vs " + fmt(ref[i]) + " (rel " + fmt(rel) + "); ";
  }
  report(4, "expected condition number table (50k samples per sigma)", pass,
         detail + fmt(secs) + " s");
}

void criterion_5_projection_error() {
  ExperimentConfig cfg;
  cfg.sigmas = {0.01, 0.05, 0.1};
  cfg.samples = 5000;
  cfg.master_seed = kSeed + 4;
  cfg.parallelism = 0;
  const ProjectionErrorResult res = run_projection_error(cfg);
  bool pass = true;
  std::string detail;
  const double svd_raw = res.rows[0].ratio_svd_raw;
  if (!(svd_raw >= 0.31 && svd_raw <= 0.36)) pass = false;
  detail += "svd/raw(0.01) " + fmt(svd_raw) + "; ";
  for (const auto& row : res.rows) {
    if (!(row.ratio_gs_svd >= 1.9 && row.ratio_gs_svd <= 2.1)) pass = false;
    detail += "gs/svd(" + fmt(row.sigma) + ") " + fmt(row.ratio_gs_svd) + "; ";
  }
  report(5, "projection error ratios: svd/raw in [0.31,0.36] at 0.01; gs/svd in [1.9,2.1]",
         pass, detail + "5000 samples per sigma");
}

void criterion_6_coordinate_independence() {
  ExperimentConfig cfg;
  cfg.sigmas = {0.5};
  cfg.samples = 10000;
  cfg.master_seed = kSeed + 5;
  cfg.parallelism = 0;
  const CoordinateDependenceResult res = run_coordinate_dependence(cfg);
  const bool pass = res.svd_max < 1e-8 && res.gs_median > 0.1;
  report(6, "svd inconsistency < 1e-8 rad over 10k samples; gs median > 0.1 rad", pass,
         "svd max " + fmt(res.svd_max) + " rad, gs median " + fmt(res.gs_median) + " rad");
}

void criterion_7_per_column() {
  ExperimentConfig cfg;
  cfg.sigmas = {0.5};
  cfg.samples = 50000;
  cfg.master_seed = kSeed + 6;
  cfg.parallelism = 0;
  const PerColumnResult res = run_per_column_error(cfg);
  const auto& row = res.rows[0];
  bool increasing = true;
  for (int c = 0; c < 2; ++c) {
    const double gap = row.gs_rms[c + 1] - row.gs_rms[c];
    const double se = std::hypot(row.gs_rms_se[c + 1], row.gs_rms_se[c]);
    if (!(gap > 3.0 * se)) increasing = false;
  }
  const double lo = *std::min_element(row.svd_rms.begin(), row.svd_rms.end());
  const double hi = *std::max_element(row.svd_rms.begin(), row.svd_rms.end());
  const bool svd_flat = (hi - lo) <= 0.02 * lo;
  bool svd_below = true;
  for (int c = 0; c < 3; ++c)
    if (!(row.svd_rms[c] < row.gs_rms[c])) svd_below = false;
  const bool pass = increasing && svd_flat && svd_below;
  report(7, "per-column RMS: gs strictly increasing (>3 se); svd within 2%; svd < gs", pass,
         "gs " + fmt(row.gs_rms[0]) + "/" + fmt(row.gs_rms[1]) + "/" + fmt(row.gs_rms[2]) +
             ", svd " + fmt(row.svd_rms[0]) + "/" + fmt(row.svd_rms[1]) + "/" +
             fmt(row.svd_rms[2]) + " (spread " + fmt((hi - lo) / lo) + ")");
}

void criterion_8_convergence() {
  ConvergenceRaceConfig cfg;
  cfg.s0 = Vec3(3.0, 1.0, 0.1);
  cfg.eta_svd = 0.3;
  cfg.eta_direct = 0.49;
  cfg.reduction_target = 100.0;
  cfg.master_seed = kSeed + 7;
  const ConvergenceRaceResult res = run_convergence_race(cfg);

  ConvergenceRaceConfig cfg_half = cfg;
  cfg_half.eta_direct = 0.5;
  const ConvergenceRaceResult res_half = run_convergence_race(cfg_half);

  const bool direct49 = res.direct.reached && res.direct.slowest_iterations <= 3;
  const bool direct50 =
      res_half.direct.slowest_iterations <= 1 && res_half.direct.final_loss < 1e-20;
  const bool svd59 = res.svd.reached && res.svd.slowest_iterations >= 57 &&
                     res.svd.slowest_iterations <= 61;
  report(8,
         "race: direct eta=0.49 within 3 iters; direct eta=0.5 one step to <1e-20; "
         "svd eta=0.3 slowest 100x in 59 +- 2 iters",
         direct49 && direct50 && svd59,
         "direct(0.49): " + std::to_string(res.direct.slowest_iterations) +
             " iters; direct(0.5): loss " + fmt(res_half.direct.final_loss) + " after " +
             std::to_string(res_half.direct.slowest_iterations) +
             " iter; svd(0.3): " + std::to_string(res.svd.slowest_iterations) +
             " iters measured (the squared-loss Hessian is 2 J'J, so the per-pair rates are "
             "|1-2*eta*lambda| = " +
             fmt(res.rate_hessian[0]) + "/" + fmt(res.rate_hessian[1]) + "/" +
             fmt(res.rate_hessian[2]) +
             ", matched by the measured rates; the 59-iteration figure assumes |1-eta*lambda|)");
}

void criterion_9_geodesic() {
  bool norms_ok = true;
  std::string detail;
  RngStream stream(kSeed + 8);
  const RotationMatrix r_star = random_rotation(stream);
  for (double theta : {0.01, 0.1, 1.0, 3.0}) {
    const RotationMatrix r(
        r_star.matrix() *
        Eigen::AngleAxisd(theta, Vec3(2, -1, 3).normalized()).toRotationMatrix());
    const double norm = geodesic_gradient(r, r_star).norm();
    const double expect = std::sqrt(3.0) / (2.0 * std::sin(theta));
    if (std::abs(norm - expect) > 1e-9) norms_ok = false;
  }

  // Central differences of the ambient arccos loss at theta = 1.
  const RotationMatrix r(r_star.matrix() *
                         Eigen::AngleAxisd(1.0, Vec3(1, 1, -2).normalized()).toRotationMatrix());
  const auto scalar = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Mat3 q = unflatten(Vec9(x));
    Eigen::VectorXd y(1);
    y[0] = std::acos(std::clamp(((q.transpose() * r_star.matrix()).trace() - 1.0) / 2.0,
                                -1.0, 1.0));
    return y;
  };
  const Eigen::MatrixXd fd = finite_difference_jacobian(scalar, Vec9(flatten(r.matrix())), 1e-6);
  const double fd_dev =
      (flatten(geodesic_gradient(r, r_star)).transpose() - fd).cwiseAbs().maxCoeff();

  const GeodesicMapResult map = run_geodesic_singularity_map(GeodesicMapConfig{});
  const bool pass = norms_ok && fd_dev <= 1e-5 && map.all_within_bound && map.skipped == 0;
  report(9,
         "geodesic gradient norm sqrt(3)/(2 sin theta) within 1e-9; FD within 1e-5; "
         "compounded norm <= bound over the default grid",
         pass,
         "fd dev " + fmt(fd_dev) + ", " + std::to_string(map.points) +
             " grid points within bound: " + (map.all_within_bound ? "yes" : "NO"));
}

void criterion_10_degeneracy() {
  // First half as stated: s1 = s2 (within 1e-10, det > 0) must be refused.
  RngStream stream(kSeed + 9);
  const Mat3 q1 = random_rotation(stream).matrix();
  const Mat3 q2 = random_rotation(stream).matrix();
  const Mat3 m_s1s2 = q1 * Vec3(2.0 + 5e-11, 2.0, 1.0).asDiagonal() * q2.transpose();
  bool threw_s1s2 = false;
  double fd_dev = -1.0;
  try {
    const Jacobian9x9 j = svd_jacobian(m_s1s2);
    const auto f = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return flatten(svdo_plus(unflatten(Vec9(x))).matrix());
    };
    fd_dev = (j - finite_difference_jacobian(f, Vec9(flatten(m_s1s2)), 1e-6))
                 .cwiseAbs()
                 .maxCoeff();
  } catch (const NearDegenerateSpectrum&) {
    threw_s1s2 = true;
  }

  // The refusals the map genuinely requires.
  bool true_rejections = true;
  try {
    svd_jacobian(Vec3(2.0, 1.0, -1.0).asDiagonal().toDenseMatrix());  // det<0, s2 = s3
    true_rejections = false;
  } catch (const NearDegenerateSpectrum&) {
  }
  try {
    svd_jacobian(Vec3(3.0, 2.0, 0.0).asDiagonal().toDenseMatrix());  // det = 0
    true_rejections = false;
  } catch (const NearDegenerateSpectrum&) {
  }

  bool gs_throws = false;
  try {
    gram_schmidt({Vec3(1.0, 2.0, 3.0), Vec3(2.0, 4.0, 6.0)});
  } catch (const DegenerateInput&) {
    gs_throws = true;
  }

  report(10,
         "degeneracy: svd_jacobian refuses s1 = s2 (within 1e-10); gram_schmidt refuses "
         "parallel inputs",
         threw_s1s2 && gs_throws && true_rejections,
         std::string("s1=s2 (det>0): ") +
             (threw_s1s2 ? "refused"
                         : "returned a finite Jacobian (the map is smooth there; max dev vs "
                           "central differences " +
                               fmt(fd_dev) +
                               "); refusal is keyed to the true non-smooth set instead: "
                               "det<0 with s2~s3 and det=0 are refused") +
             (true_rejections ? "" : " [true-degeneracy refusals BROKEN]") +
             "; parallel gram_schmidt " + (gs_throws ? "refused" : "NOT refused"));
}

void criterion_11_determinism(const std::string& rotjac_bin) {
  if (rotjac_bin.empty()) {
    report(11, "byte-identical CSV across parallelism", false,
           "rotjac binary path not supplied to the acceptance runner");
    return;
  }
  const auto dir = std::filesystem::temp_directory_path();
  const std::string out1 = (dir / "rotjac_acc_p1.csv").string();
  const std::string out8 = (dir / "rotjac_acc_p8.csv").string();
  const std::string base = "\"" + rotjac_bin +
                           "\" projection-error --seed 42 --sigmas 0.01,0.05,0.1 "
                           "--samples 5000 --out ";
  const int rc1 = std::system((base + out1 + " --parallelism 1 > /dev/null").c_str());
  const int rc8 = std::system((base + out8 + " --parallelism 8 > /dev/null").c_str());
  const std::string a = slurp(out1);
  const std::string b = slurp(out8);
  const bool pass = rc1 == 0 && rc8 == 0 && !a.empty() && a == b;
  report(11, "projection-error --seed 42: byte-identical CSV at parallelism 1 and 8", pass,
         "run status " + std::to_string(rc1) + "/" + std::to_string(rc8) + ", " +
             std::to_string(a.size()) + " bytes" + (pass ? ", identical" : ", MISMATCH"));
  std::filesystem::remove(out1);
  std::filesystem::remove(out8);
  std::filesystem::remove(dir / "rotjac_acc_p1.manifest.json");
  std::filesystem::remove(dir / "rotjac_acc_p8.manifest.json");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string rotjac_bin = argc > 1 ? argv[1] : "";
  std::cout << "rotjac acceptance suite\n-----------------------\n";

  criterion_1_jacobian_exactness();
  criterion_2_spectrum();
  criterion_3_gir();
  criterion_4_kappa_table();
  criterion_5_projection_error();
  criterion_6_coordinate_independence();
  criterion_7_per_column();
  criterion_8_convergence();
  criterion_9_geodesic();
  criterion_10_degeneracy();
  criterion_11_determinism(rotjac_bin);

  int failed = 0;
  for (const auto& c : g_results)
    if (!c.pass) ++failed;
  std::cout << "-----------------------\n"
            << (g_results.size() - failed) << "/" << g_results.size() << " criteria passed";
  if (failed > 0) {
    std::cout << "; failing:";
    for (const auto& c : g_results)
      if (!c.pass) std::cout << " " << c.id;
    std::cout << " (each keeps its stated form and reports the measured behaviour; "
                 "see the detail lines)";
  }
  std::cout << "\n";
  return failed == 0 ? 0 : 1;
}
