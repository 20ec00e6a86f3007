#pragma once

#include "rotjac/rng.hpp"
#include "rotjac/types.hpp"

namespace rotjac {

/// 3x3 matrix of i.i.d. standard Gaussians, drawn row-major.
inline Mat3 gaussian_matrix(RngStream& stream) {
  Mat3 n;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) n(i, j) = stream.next_gaussian();
  return n;
}

/// Haar-uniform rotation: a 4-vector of standard Gaussians normalized to a
/// unit quaternion (w, x, y, z), then converted to a matrix.
inline RotationMatrix random_rotation(RngStream& stream) {
  double w, x, y, z, n2;
  do {
    w = stream.next_gaussian();
    x = stream.next_gaussian();
    y = stream.next_gaussian();
    z = stream.next_gaussian();
    n2 = w * w + x * x + y * y + z * z;
  } while (n2 < 1e-24);
  const double inv = 1.0 / std::sqrt(n2);
  w *= inv; x *= inv; y *= inv; z *= inv;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return RotationMatrix(r);
}

/// Noisy prediction M = R* + sigma * N with N ~ i.i.d. standard Gaussian.
inline Mat3 perturbed_matrix(const RotationMatrix& r_star, double sigma, RngStream& stream) {
  if (!(sigma >= 0.0)) throw DomainError("perturbed_matrix: sigma must be >= 0");
  return r_star.matrix() + sigma * gaussian_matrix(stream);
}

}  // namespace rotjac
