#pragma once

#include <Eigen/Dense>

#include "rotjac/errors.hpp"

namespace rotjac {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Row-major flattening: entry (i,j) of a 3x3 matrix maps to index 3*i + j.
inline Vec9 flatten(const Mat3& m) {
  Vec9 v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[3 * i + j] = m(i, j);
  return v;
}

inline Mat3 unflatten(const Vec9& v) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v[3 * i + j];
  return m;
}

/// Cross-product matrix: skew(a) * b == a.cross(b).
template <typename Derived>
Mat3 skew(const Eigen::MatrixBase<Derived>& a) {
  Mat3 s;
  s << 0.0, -a[2], a[1],
       a[2], 0.0, -a[0],
      -a[1], a[0], 0.0;
  return s;
}

/// Element of SO(3). The constructor re-validates; callers are not trusted.
class RotationMatrix {
 public:
  static constexpr double kOrthoTol = 1e-9;

  explicit RotationMatrix(const Mat3& m) : m_(m) {
    const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
    const double det = m.determinant();
    if (!(ortho <= kOrthoTol) || !(std::abs(det - 1.0) <= kOrthoTol)) {
      throw DegenerateInput("RotationMatrix: |R'R - I| = " + std::to_string(ortho) +
                            ", det = " + std::to_string(det));
    }
  }

  static RotationMatrix identity() { return RotationMatrix(Mat3::Identity()); }

  const Mat3& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Mat3 m_;
};

/// Factors of M = U * diag(s) * V' with s1 >= s2 >= s3 >= 0 and
/// det_sign = sign(det M) (an exact zero determinant maps to -1, matching the
/// convention that det(M) = 0 is handled as the det < 0 limit).
struct SvdFactors {
  Mat3 u;
  Vec3 s;
  Mat3 v;
  int det_sign;  // +1 or -1
};

/// Two free 3-vectors feeding the Gram-Schmidt map.
struct SixDParams {
  Vec3 t1;
  Vec3 t2;
};

}  // namespace rotjac
