#pragma once

#include <cmath>

#include "rotjac/types.hpp"

namespace rotjac {

namespace detail {

// Orthonormal completion: a unit vector orthogonal to the given unit vector.
inline Vec3 any_unit_orthogonal(const Vec3& u) {
  int k = 0;
  if (std::abs(u[1]) < std::abs(u[k])) k = 1;
  if (std::abs(u[2]) < std::abs(u[k])) k = 2;
  Vec3 e = Vec3::Zero();
  e[k] = 1.0;
  return (e - u.dot(e) * u).normalized();
}

}  // namespace detail

/// 3x3 SVD by one-sided Jacobi: Givens rotations are applied from the right
/// until the columns of B = M * V are mutually orthogonal, then U and the
/// singular values are read off the column norms. A column pair counts as
/// converged when |b_p . b_q| <= 1e-13 * |b_p| * |b_q|; the relative form
/// keeps U orthonormal to ~1e-15 even when singular values differ by many
/// orders of magnitude. Hard cap of 60 sweeps.
///
/// Deterministic sign convention: the largest-magnitude entry of every U
/// column is nonnegative (V columns are flipped in pairs with U, which leaves
/// the product U * diag(s) * V' unchanged).
inline SvdFactors svd3(const Mat3& m) {
  if (!m.allFinite()) throw DegenerateInput("svd3: non-finite entries");

  constexpr double kRelTol = 1e-13;
  constexpr int kMaxSweeps = 60;

  Mat3 b = m;
  Mat3 v = Mat3::Identity();

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (auto [p, q] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
      const double app = b.col(p).squaredNorm();
      const double aqq = b.col(q).squaredNorm();
      const double apq = b.col(p).dot(b.col(q));
      if (std::abs(apq) <= kRelTol * std::sqrt(app * aqq)) continue;
      converged = false;
      const double zeta = (aqq - app) / (2.0 * apq);
      const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
      const double c = 1.0 / std::hypot(1.0, t);
      const double s = c * t;
      const Vec3 bp = c * b.col(p) - s * b.col(q);
      const Vec3 bq = s * b.col(p) + c * b.col(q);
      b.col(p) = bp;
      b.col(q) = bq;
      const Vec3 vp = c * v.col(p) - s * v.col(q);
      const Vec3 vq = s * v.col(p) + c * v.col(q);
      v.col(p) = vp;
      v.col(q) = vq;
    }
  }
  if (!converged) throw NumericalFailure("svd3: no convergence in 60 sweeps");

  Vec3 s(b.col(0).norm(), b.col(1).norm(), b.col(2).norm());

  // Sort descending, permuting B and V columns in lockstep.
  for (int i = 0; i < 2; ++i) {
    int k = i;
    for (int j = i + 1; j < 3; ++j)
      if (s[j] > s[k]) k = j;
    if (k != i) {
      std::swap(s[i], s[k]);
      b.col(i).swap(b.col(k));
      v.col(i).swap(v.col(k));
    }
  }

  const double det = m.determinant();
  const double col_floor = m.norm() * 1e-15;

  Mat3 u = Mat3::Identity();
  int rank = 0;
  while (rank < 3 && s[rank] > col_floor) ++rank;
  for (int j = 0; j < rank; ++j) u.col(j) = b.col(j) / s[j];
  if (rank == 2) {
    Vec3 u2 = u.col(0).cross(u.col(1)).normalized();
    // Orient along whatever signal survives in the dropped column.
    if (s[2] > 0.0 && u2.dot(b.col(2)) < 0.0) u2 = -u2;
    else if (s[2] == 0.0 && det < 0.0) u2 = -u2;
    u.col(2) = u2;
  } else if (rank == 1) {
    u.col(1) = detail::any_unit_orthogonal(u.col(0));
    u.col(2) = u.col(0).cross(u.col(1));
  }

  for (int j = 0; j < 3; ++j) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(u(i, j)) > std::abs(u(k, j))) k = i;
    if (u(k, j) < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }

  return SvdFactors{u, s, v, det > 0.0 ? +1 : -1};
}

}  // namespace rotjac
