#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>

#include "rotjac/so3.hpp"
#include "rotjac/svd3.hpp"
#include "rotjac/types.hpp"

namespace rotjac {

using Jacobian9x9 = Eigen::Matrix<double, 9, 9>;
using Jacobian9x6 = Eigen::Matrix<double, 9, 6>;

/// Gap below which projection derivatives are refused rather than returned.
constexpr double kSpectrumTol = 1e-8;

enum class PairSubspace { kAntisymmetric, kSymmetric };

/// Differential of the projection in the singular frame.
///
/// For an input perturbation dM let P = U' dM V. The output differential is
/// dR = U Psi V' where Psi couples each off-diagonal pair (i, j) of P through
/// a scalar gain:
///
///   det(M) > 0:  Psi_ij = (P_ij - P_ji) / (s_i + s_j)   (antisymmetric part)
///   det(M) < 0:  pair (1,2) as above; pairs (i,3) respond to the symmetric
///                part instead, Psi_i3 = Psi_3i = (P_i3 + P_3i) / (s_i - s_3).
///
/// The stored `phi` is the antisymmetric left-frame generator Psi * Sigma'
/// (Sigma' = diag(1, 1, det_sign)), so dR = U * phi * Sigma' * V' and
/// dR R' = (U phi U') holds for both determinant signs.
struct SvdFrameDifferential {
  Mat3 p;
  Mat3 phi;
  std::array<PairSubspace, 3> active_subspace_labels;  // pairs (1,2), (1,3), (2,3)
};

namespace detail {

inline void require_jacobian_domain(const Mat3& m, const SvdFactors& f) {
  if (m.determinant() == 0.0)
    throw NearDegenerateSpectrum("svd jacobian: det(M) = 0, branch undefined");
  const double gap = singular_value_gap_from(f.s, f.det_sign);
  if (gap < kSpectrumTol)
    throw NearDegenerateSpectrum("svd jacobian: singular value gap " + std::to_string(gap));
}

// Psi for a frame perturbation P (see SvdFrameDifferential).
inline Mat3 frame_response(const Vec3& s, int det_sign, const Mat3& p) {
  Mat3 psi = Mat3::Zero();
  psi(0, 1) = (p(0, 1) - p(1, 0)) / (s[0] + s[1]);
  psi(1, 0) = -psi(0, 1);
  if (det_sign > 0) {
    psi(0, 2) = (p(0, 2) - p(2, 0)) / (s[0] + s[2]);
    psi(2, 0) = -psi(0, 2);
    psi(1, 2) = (p(1, 2) - p(2, 1)) / (s[1] + s[2]);
    psi(2, 1) = -psi(1, 2);
  } else {
    psi(0, 2) = (p(0, 2) + p(2, 0)) / (s[0] - s[2]);
    psi(2, 0) = psi(0, 2);
    psi(1, 2) = (p(1, 2) + p(2, 1)) / (s[1] - s[2]);
    psi(2, 1) = psi(1, 2);
  }
  return psi;
}

}  // namespace detail

inline SvdFrameDifferential svd_frame_differential(const SvdFactors& f, const Mat3& dm) {
  const Mat3 p = f.u.transpose() * dm * f.v;
  const Mat3 psi = detail::frame_response(f.s, f.det_sign, p);
  Mat3 phi = psi;
  if (f.det_sign < 0) phi.col(2) = -phi.col(2);  // phi = Psi * Sigma'
  const PairSubspace swapped =
      f.det_sign > 0 ? PairSubspace::kAntisymmetric : PairSubspace::kSymmetric;
  return SvdFrameDifferential{p, phi, {PairSubspace::kAntisymmetric, swapped, swapped}};
}

/// Directional derivative of svdo_plus at m along dm.
inline Mat3 svd_jacobian_apply(const SvdFactors& f, const Mat3& dm) {
  const Mat3 p = f.u.transpose() * dm * f.v;
  return f.u * detail::frame_response(f.s, f.det_sign, p) * f.v.transpose();
}

/// d vec(R) / d vec(M) of M -> svdo_plus(M), both sides flattened row-major.
/// Assembled explicitly as 9 columns so callers can feed it to a dense SVD.
inline Jacobian9x9 svd_jacobian(const Mat3& m) {
  const SvdFactors f = svd3(m);
  detail::require_jacobian_domain(m, f);
  Jacobian9x9 j;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      Mat3 dm = Mat3::Zero();
      dm(k, l) = 1.0;
      j.col(3 * k + l) = flatten(svd_jacobian_apply(f, dm));
    }
  return j;
}

/// Nonzero singular values of the projection Jacobian, rank, norm and
/// condition number, in closed form from the factors. The three values are
/// 2 over the effective pair denominators: s_i + s_j for det(M) > 0, and
/// {s_1 + s_2, s_1 - s_3, s_2 - s_3} for det(M) < 0.
struct SpectrumReport {
  Vec3 nonzero_singular_values;  // sorted descending
  int rank;
  int null_space_dim;
  double spectral_norm;
  double condition_number;
};

inline SpectrumReport svd_jacobian_spectrum(const Mat3& m) {
  const SvdFactors f = svd3(m);
  detail::require_jacobian_domain(m, f);
  const Vec3& s = f.s;
  Vec3 vals;
  if (f.det_sign > 0)
    vals << 2.0 / (s[1] + s[2]), 2.0 / (s[0] + s[2]), 2.0 / (s[0] + s[1]);
  else
    vals << 2.0 / (s[1] - s[2]), 2.0 / (s[0] - s[2]), 2.0 / (s[0] + s[1]);
  return SpectrumReport{vals, 3, 6, vals[0], vals[0] / vals[2]};
}

/// Adjoint of the projection Jacobian: returns J' vec(grad_r) reshaped, i.e.
/// the gradient with respect to M of the scalar <grad_r, svdo_plus(M)>.
/// Computed as U Z V' where Z mirrors the frame gains of the forward map.
inline Mat3 svd_backward(const Mat3& m, const Mat3& grad_r) {
  const SvdFactors f = svd3(m);
  detail::require_jacobian_domain(m, f);
  const Vec3& s = f.s;
  const Mat3 g = f.u.transpose() * grad_r * f.v;
  Mat3 z = Mat3::Zero();
  z(0, 1) = (g(0, 1) - g(1, 0)) / (s[0] + s[1]);
  z(1, 0) = -z(0, 1);
  if (f.det_sign > 0) {
    z(0, 2) = (g(0, 2) - g(2, 0)) / (s[0] + s[2]);
    z(2, 0) = -z(0, 2);
    z(1, 2) = (g(1, 2) - g(2, 1)) / (s[1] + s[2]);
    z(2, 1) = -z(1, 2);
  } else {
    z(0, 2) = (g(0, 2) + g(2, 0)) / (s[0] - s[2]);
    z(2, 0) = z(0, 2);
    z(1, 2) = (g(1, 2) + g(2, 1)) / (s[1] - s[2]);
    z(2, 1) = z(1, 2);
  }
  return f.u * z * f.v.transpose();
}

/// d vec(R) / d (t1, t2) of the Gram-Schmidt map, 9x6, output flattened
/// row-major and input ordered t1 then t2.
///
/// Blocks: d r1 / d t1 = (I - r1 r1') / |t1| and d r1 / d t2 = 0; the second
/// column routes through u = t2 - (r1 . t2) r1 and its normalization; the
/// third column is the cross-product chain -[r2]x dr1 + [r1]x dr2.
inline Jacobian9x6 gs_jacobian(const SixDParams& params) {
  const double n1 = params.t1.norm();
  if (n1 < kSpectrumTol) throw DegenerateInput("gs_jacobian: |t1| ~ 0");
  const Vec3 r1 = params.t1 / n1;
  const Vec3 u = params.t2 - r1.dot(params.t2) * r1;
  const double nu = u.norm();
  if (nu < kSpectrumTol) throw DegenerateInput("gs_jacobian: t2 parallel to t1");
  const Vec3 r2 = u / nu;

  const Mat3 dr1_dt1 = (Mat3::Identity() - r1 * r1.transpose()) / n1;
  const Mat3 du_dt1 = -(r1 * params.t2.transpose() + r1.dot(params.t2) * Mat3::Identity()) * dr1_dt1;
  const Mat3 du_dt2 = Mat3::Identity() - r1 * r1.transpose();
  const Mat3 dr2_du = (Mat3::Identity() - r2 * r2.transpose()) / nu;
  const Mat3 dr2_dt1 = dr2_du * du_dt1;
  const Mat3 dr2_dt2 = dr2_du * du_dt2;
  const Mat3 dr3_dt1 = -skew(r2) * dr1_dt1 + skew(r1) * dr2_dt1;
  const Mat3 dr3_dt2 = skew(r1) * dr2_dt2;

  Jacobian9x6 j = Jacobian9x6::Zero();
  const std::array<std::array<const Mat3*, 2>, 3> blocks = {{
      {{&dr1_dt1, nullptr}},
      {{&dr2_dt1, &dr2_dt2}},
      {{&dr3_dt1, &dr3_dt2}},
  }};
  for (int col = 0; col < 3; ++col)
    for (int k = 0; k < 2; ++k) {
      const Mat3* block = blocks[col][k];
      if (!block) continue;
      for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) j(3 * i + col, 3 * k + l) = (*block)(i, l);
    }
  return j;
}

/// |t1| / |r2''|, a lower bound on the condition number of gs_jacobian
/// restricted to its column space.
inline double gs_condition_lower_bound(const SixDParams& params) {
  const double n1 = params.t1.norm();
  if (n1 < kSpectrumTol) throw DegenerateInput("gs_condition_lower_bound: |t1| ~ 0");
  const Vec3 r1 = params.t1 / n1;
  const double nu = (params.t2 - r1.dot(params.t2) * r1).norm();
  if (nu < kSpectrumTol) throw DegenerateInput("gs_condition_lower_bound: t2 parallel to t1");
  return n1 / nu;
}

/// Ambient gradient of the geodesic distance with respect to r:
/// -R* / (2 sin theta), with Frobenius norm sqrt(3) / (2 sin theta).
/// Refused within 1e-6 of the endpoints where 1/sin(theta) blows up.
inline Mat3 geodesic_gradient(const RotationMatrix& r, const RotationMatrix& r_star) {
  const double theta = geodesic_distance(r, r_star);
  if (theta <= 1e-6 || theta >= M_PI - 1e-6)
    throw AngleSingularity("geodesic_gradient: theta = " + std::to_string(theta));
  return -r_star.matrix() / (2.0 * std::sin(theta));
}

/// Norm of the full chain gradient d theta(svdo_plus(M), R*) / dM together
/// with the product bound sqrt(3) / (gap * sin theta).
struct CompoundedGradient {
  double norm;
  double bound;
};

inline CompoundedGradient compounded_gradient_norm(const Mat3& m, const RotationMatrix& r_star) {
  const SvdFactors f = svd3(m);
  detail::require_jacobian_domain(m, f);
  const RotationMatrix r = svdo_plus(f);
  const double theta = geodesic_distance(r, r_star);
  const Mat3 grad_r = geodesic_gradient(r, r_star);
  const double norm = svd_backward(m, grad_r).norm();
  const double gap = singular_value_gap_from(f.s, f.det_sign);
  return CompoundedGradient{norm, std::sqrt(3.0) / (gap * std::sin(theta))};
}

/// Central finite differences, column j = (f(x + h e_j) - f(x - h e_j)) / 2h.
/// This is the independent oracle every analytic Jacobian is tested against.
template <typename F>
Eigen::MatrixXd finite_difference_jacobian(F&& f, const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw DomainError("finite_difference_jacobian: h must be > 0");
  const Eigen::VectorXd y0 = f(x);
  Eigen::MatrixXd j(y0.size(), x.size());
  for (Eigen::Index col = 0; col < x.size(); ++col) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[col] += h;
    xm[col] -= h;
    j.col(col) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

}  // namespace rotjac
