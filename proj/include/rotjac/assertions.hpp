#pragma once

#include "rotjac/experiments.hpp"
#include "rotjac/report.hpp"

namespace rotjac {

/// Built-in checks mirroring the repository's acceptance gates. Each check is
/// evaluated only when the run's configuration covers it (matching sigma,
/// enough samples); every Monte-Carlo comparison carries a standard-error
/// allowance on top of its stated tolerance.
std::vector<AssertionResult> check_kappa_table(const KappaTableResult& result);
std::vector<AssertionResult> check_projection_error(const ProjectionErrorResult& result);
std::vector<AssertionResult> check_coordinate_dependence(const CoordinateDependenceResult& result);
std::vector<AssertionResult> check_per_column(const PerColumnResult& result);
std::vector<AssertionResult> check_gradient_scatter(const GradientScatterResult& result);
std::vector<AssertionResult> check_convergence_race(const ConvergenceRaceConfig& cfg,
                                                    const ConvergenceRaceResult& result);
std::vector<AssertionResult> check_geodesic_map(const GeodesicMapResult& result);
std::vector<AssertionResult> check_jacobian_check(const JacobianCheckResult& result);

inline bool all_pass(const std::vector<AssertionResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace rotjac
