#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rotjac/types.hpp"

namespace rotjac {

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

/// Column-named record block; rows are emitted sorted by sample index.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct MetricSummary {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
  std::optional<double> prediction;
  std::optional<double> relative_error;
};

enum class GsInputMode {
  kMatrixColumns,  // feed the first two columns of the perturbed 3x3 matrix
  kDirectSixD,     // perturb only the six entries of (r1*, r2*)
};

struct ExperimentConfig {
  std::vector<double> sigmas;
  std::size_t samples = 1;
  std::uint64_t master_seed = 0;
  unsigned parallelism = 1;
  GsInputMode gs_mode = GsInputMode::kMatrixColumns;
};

/// Degenerate draws are skipped and counted; more than 1% of them means the
/// statistics are not trustworthy and the run fails loudly. Conditioning
/// exclusions that are part of an estimand (det <= 0 in the kappa table) are
/// tracked separately and not subject to this budget.
constexpr double kSkipBudget = 0.01;

// ---------------------------------------------------------------------------

struct KappaRow {
  double sigma = 0.0;
  std::size_t samples = 0;
  std::size_t used = 0;
  std::size_t det_excluded = 0;
  double kappa_mean = 0.0;
  double kappa_se = 0.0;
  std::optional<double> formula;
  std::optional<double> relative_error;
};

struct KappaTableResult {
  std::vector<KappaRow> rows;
  Table records;
  std::vector<MetricSummary> summaries;
};

KappaTableResult run_kappa_table(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct ProjectionErrorRow {
  double sigma = 0.0;
  std::size_t samples = 0;
  std::size_t used = 0;
  std::size_t skipped = 0;
  double svd_mse = 0.0, svd_se = 0.0;
  double gs_mse = 0.0, gs_se = 0.0;
  double raw_mse = 0.0, raw_se = 0.0;
  double ratio_gs_svd = 0.0, ratio_gs_svd_se = 0.0;
  double ratio_svd_raw = 0.0, ratio_svd_raw_se = 0.0;
  double pred_svd = 0.0, pred_gs = 0.0, pred_raw = 0.0;
};

struct ProjectionErrorResult {
  std::vector<ProjectionErrorRow> rows;
  Table records;
  std::vector<MetricSummary> summaries;
};

ProjectionErrorResult run_projection_error(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct CoordinateDependenceResult {
  double sigma = 0.0;
  std::size_t samples = 0;
  std::size_t gs_skipped = 0;
  double svd_max = 0.0;
  double gs_q25 = 0.0, gs_median = 0.0, gs_q75 = 0.0;
  std::array<std::uint64_t, 180> svd_histogram{};  // 1-degree bins over [0, 180)
  std::array<std::uint64_t, 180> gs_histogram{};
  Table records;
  std::vector<MetricSummary> summaries;
};

CoordinateDependenceResult run_coordinate_dependence(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct PerColumnRow {
  double sigma = 0.0;
  std::size_t samples = 0;
  std::size_t used = 0;
  std::size_t skipped = 0;
  std::array<double, 3> gs_rms{}, gs_rms_se{};
  std::array<double, 3> svd_rms{}, svd_rms_se{};
};

struct PerColumnResult {
  std::vector<PerColumnRow> rows;
  Table records;
  std::vector<MetricSummary> summaries;
};

PerColumnResult run_per_column_error(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct GradientScatterResult {
  double sigma = 0.0;
  std::size_t samples = 0;
  std::size_t svd_degenerate = 0;
  std::size_t gs_degenerate = 0;
  double svd_sign_disagreement = 0.0;  // fraction over non-degenerate samples
  double gs_sign_disagreement = 0.0;
  bool direct_gradient_exact = true;  // grad_direct == 2 * error, every sample
  Table records;
  std::vector<MetricSummary> summaries;
};

GradientScatterResult run_gradient_scatter(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct ConvergenceRaceConfig {
  Vec3 s0{3.0, 1.0, 0.1};
  double eta_direct = 0.49;
  double eta_svd = 0.3;
  double reduction_target = 100.0;  // stop once components shrink by this factor
  double excite = 1e-3;             // pair-direction excitation of the start
  std::uint64_t master_seed = 0;
  std::size_t max_iterations = 200000;
};

struct RaceOutcome {
  std::string method;
  double eta = 0.0;
  bool reached = false;
  bool diverged = false;        // loss grew past 10x its starting value
  bool hit_degeneracy = false;  // the iterate crossed into the refused gap region
  std::array<std::size_t, 3> iterations_per_pair{};  // pairs (1,2), (1,3), (2,3)
  std::size_t slowest_iterations = 0;
  std::array<double, 3> measured_rate{};
  double final_loss = 0.0;
};

struct ConvergenceRaceResult {
  RaceOutcome direct;
  RaceOutcome svd;
  std::array<double, 3> rate_formula{};  // |1 - eta lambda|, lambda = 4/(si+sj)^2
  std::array<double, 3> rate_hessian{};  // |1 - 2 eta lambda|, exact squared-loss model
  Table records;                         // method, iteration, loss, c12, c13, c23
  std::vector<MetricSummary> summaries;
};

ConvergenceRaceResult run_convergence_race(const ConvergenceRaceConfig& cfg);

// ---------------------------------------------------------------------------

struct GeodesicMapConfig {
  std::vector<double> theta_grid{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0};
  std::vector<double> s3_grid{0.05, 0.1, 0.2, 0.5, 1.0};
};

struct GeodesicMapResult {
  std::size_t points = 0;
  std::size_t skipped = 0;
  bool all_within_bound = true;
  Table records;  // theta, s3, compounded_norm, bound, r_grad_norm, direct_grad_norm
  std::vector<MetricSummary> summaries;
};

GeodesicMapResult run_geodesic_singularity_map(const GeodesicMapConfig& cfg);

// ---------------------------------------------------------------------------

struct JacobianCheckConfig {
  std::size_t trials = 1000;
  std::uint64_t master_seed = 0;
  unsigned parallelism = 1;
  double fd_step = 1e-6;
};

struct JacobianCheckResult {
  std::size_t trials = 0;
  double max_dev_svd = 0.0;
  double max_dev_gs = 0.0;
  Table records;
  std::vector<MetricSummary> summaries;
};

JacobianCheckResult run_jacobian_check(const JacobianCheckConfig& cfg);

}  // namespace rotjac
