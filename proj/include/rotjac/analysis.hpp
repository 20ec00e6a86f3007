#pragma once

#include <array>
#include <cmath>

#include "rotjac/errors.hpp"
#include "rotjac/types.hpp"

namespace rotjac {

/// Expected largest eigenvalue of the 3x3 Gaussian symmetric ensemble
/// W = (N + N')/2, in closed form.
inline double goe3_top_eigenvalue() { return 1.5 * std::sqrt(3.0 / M_PI); }

/// Fraction of isotropic gradient energy surviving the pullback J':
/// tr(J J') divided by the input ambient dimension (number of columns).
template <typename Derived>
double gradient_info_retention(const Eigen::MatrixBase<Derived>& j) {
  return j.squaredNorm() / static_cast<double>(j.cols());
}

/// First-order prediction (2 + sigma c3) / (2 - sigma c3) for the mean
/// condition number of the projection Jacobian under M = R + sigma N.
/// Diverges at sigma = 2 / c3.
struct KappaPrediction {
  double sigma;
  double formula_value;
  double divergence_sigma;
};

inline KappaPrediction expected_kappa_formula(double sigma) {
  const double c3 = goe3_top_eigenvalue();
  const double divergence = 2.0 / c3;
  if (!(sigma >= 0.0) || sigma >= divergence)
    throw DomainError("expected_kappa_formula: sigma outside [0, 2/c3)");
  return KappaPrediction{sigma, (2.0 + sigma * c3) / (2.0 - sigma * c3), divergence};
}

/// Leading-order mean squared projection errors under M = R* + sigma N:
/// 3 sigma^2 after the SVD projection, 6 sigma^2 after Gram-Schmidt on the
/// first two columns, 9 sigma^2 for the raw matrix.
struct ProjectionErrorPrediction {
  double svd_mse;
  double gs_mse;
  double raw_mse;
};

inline ProjectionErrorPrediction projection_error_prediction(double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("projection_error_prediction: sigma < 0");
  const double s2 = sigma * sigma;
  return ProjectionErrorPrediction{3.0 * s2, 6.0 * s2, 9.0 * s2};
}

/// Tabulated gradient-descent rate model for the squared-Frobenius losses.
///
/// Eigenvalue entries are lambda_ij = 4 / (s_i + s_j)^2 per pair; per-pair
/// contraction is |1 - eta lambda|, the stability limit is
/// eta < (s2 + s3)^2 / 2 and the direct-regression rate is |1 - 2 eta|.
/// Note the exact Hessian of L(M) = |svdo_plus(M) - R*|^2 is 2 J'J, so the
/// dynamics measured by the race harness contract at |1 - 2 eta lambda|;
/// both models are reported there side by side.
struct ConvergencePrediction {
  Vec3 s;
  double eta;
  std::array<double, 3> eigenvalues;          // descending: pairs (2,3), (1,3), (1,2)
  std::array<double, 3> contraction_factors;  // pair order (1,2), (1,3), (2,3)
  double max_step_size;                       // (s2 + s3)^2 / 2
  double slowest_rate;                        // |1 - 4 eta / (s1 + s2)^2|
  double direct_rate;                         // |1 - 2 eta|
  double iteration_ratio;                     // (s1 + s2)^2 / 2

  double slowest_rate_at(double eta_query) const {
    return std::abs(1.0 - 4.0 * eta_query / ((s[0] + s[1]) * (s[0] + s[1])));
  }
};

inline ConvergencePrediction convergence_prediction(const Vec3& s, double eta) {
  if (!(s[0] >= s[1] && s[1] >= s[2] && s[2] > 0.0))
    throw DomainError("convergence_prediction: need s1 >= s2 >= s3 > 0");
  if (!(eta > 0.0)) throw DomainError("convergence_prediction: eta must be > 0");
  const double l12 = 4.0 / ((s[0] + s[1]) * (s[0] + s[1]));
  const double l13 = 4.0 / ((s[0] + s[2]) * (s[0] + s[2]));
  const double l23 = 4.0 / ((s[1] + s[2]) * (s[1] + s[2]));
  ConvergencePrediction p;
  p.s = s;
  p.eta = eta;
  p.eigenvalues = {l23, l13, l12};
  p.contraction_factors = {std::abs(1.0 - eta * l12), std::abs(1.0 - eta * l13),
                           std::abs(1.0 - eta * l23)};
  p.max_step_size = (s[1] + s[2]) * (s[1] + s[2]) / 2.0;
  p.slowest_rate = std::abs(1.0 - eta * l12);
  p.direct_rate = std::abs(1.0 - 2.0 * eta);
  p.iteration_ratio = (s[0] + s[1]) * (s[0] + s[1]) / 2.0;
  return p;
}

}  // namespace rotjac
