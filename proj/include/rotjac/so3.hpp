#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "rotjac/svd3.hpp"
#include "rotjac/types.hpp"

namespace rotjac {

/// Nearest rotation in Frobenius norm: U * diag(1, 1, sign(det M)) * V'.
inline RotationMatrix svdo_plus(const Mat3& m) {
  const SvdFactors f = svd3(m);
  if (f.s[0] <= 0.0) throw DegenerateInput("svdo_plus: zero matrix");
  Mat3 r = f.u.leftCols<2>() * f.v.leftCols<2>().transpose() +
           static_cast<double>(f.det_sign) * f.u.col(2) * f.v.col(2).transpose();
  return RotationMatrix(r);
}

inline RotationMatrix svdo_plus(const SvdFactors& f) {
  if (f.s[0] <= 0.0) throw DegenerateInput("svdo_plus: zero matrix");
  Mat3 r = f.u.leftCols<2>() * f.v.leftCols<2>().transpose() +
           static_cast<double>(f.det_sign) * f.u.col(2) * f.v.col(2).transpose();
  return RotationMatrix(r);
}

/// Orthogonalize (t1, t2): normalize t1, project t1 out of t2 and normalize,
/// close with the cross product. First column stays parallel to t1.
inline RotationMatrix gram_schmidt(const SixDParams& p) {
  constexpr double kTol = 1e-12;
  const double n1 = p.t1.norm();
  if (n1 < kTol) throw DegenerateInput("gram_schmidt: |t1| ~ 0");
  const Vec3 r1 = p.t1 / n1;
  const Vec3 u = p.t2 - r1.dot(p.t2) * r1;
  const double nu = u.norm();
  if (nu < kTol) throw DegenerateInput("gram_schmidt: t2 parallel to t1");
  const Vec3 r2 = u / nu;
  const Vec3 r3 = r1.cross(r2);
  Mat3 r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r3;
  return RotationMatrix(r);
}

/// Squared Frobenius distance |r - r*|_F^2.
inline double frobenius_loss(const Mat3& r, const RotationMatrix& r_star) {
  return (r - r_star.matrix()).squaredNorm();
}

/// Relative rotation angle in [0, pi]. Computed as atan2 of the (sin, cos)
/// pair extracted from R'R*: the skew part carries sin(theta), so the result
/// is first-order accurate near 0 where the pure-arccos form bottoms out at
/// the sqrt(eps) noise floor. The cosine argument is clamped to [-1, 1].
inline double geodesic_distance(const RotationMatrix& r, const RotationMatrix& r_star) {
  const Mat3 q = r.matrix().transpose() * r_star.matrix();
  const double c = std::clamp((q.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Mat3 k = 0.5 * (q - q.transpose());
  const double s = std::min(k.norm() / std::sqrt(2.0), 1.0);
  return std::atan2(s, c);
}

/// Minimum effective denominator of the projection Jacobian:
/// s2 + s3 when det(M) > 0, min(s1 - s3, s2 - s3, s1 + s2) otherwise
/// (det(M) = 0 is handled as the det < 0 limit).
inline double singular_value_gap_from(const Vec3& s, int det_sign) {
  if (det_sign > 0) return s[1] + s[2];
  return std::min({s[0] - s[2], s[1] - s[2], s[0] + s[1]});
}

inline double singular_value_gap(const Mat3& m) {
  const SvdFactors f = svd3(m);
  return singular_value_gap_from(f.s, f.det_sign);
}

/// Split R*'N into its antisymmetric part A (tangent to SO(3) at R*) and
/// symmetric part S (normal). A + S = R*'N and <A, S>_F = 0.
inline std::pair<Mat3, Mat3> tangent_normal_split(const RotationMatrix& r_star, const Mat3& n) {
  const Mat3 p = r_star.matrix().transpose() * n;
  return {0.5 * (p - p.transpose()), 0.5 * (p + p.transpose())};
}

}  // namespace rotjac
