#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "rotjac/rng.hpp"
#include "rotjac/sampling.hpp"
#include "rotjac/so3.hpp"

using namespace rotjac;

namespace {

Mat3 rot_z(double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
}

// Quaternion-based oracle for the relative rotation angle (double cover:
// angle = 2 atan2(|vec|, |w|)).
double angle_via_quaternion(const Mat3& a, const Mat3& b) {
  const Eigen::Quaterniond q(Mat3(a.transpose() * b));
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

}  // namespace

TEST_CASE("svdo_plus returns a rotation unchanged") {
  RngStream stream(11);
  for (int t = 0; t < 100; ++t) {
    const RotationMatrix r = random_rotation(stream);
    CHECK((svdo_plus(r.matrix()).matrix() - r.matrix()).norm() <= 1e-12);
  }
}

TEST_CASE("svdo_plus projects the reflection diag(2,1,-1) to the identity") {
  const Mat3 m = Vec3(2.0, 1.0, -1.0).asDiagonal().toDenseMatrix();
  const Mat3 r = svdo_plus(m).matrix();
  CHECK((r - Mat3::Identity()).norm() <= 1e-12);

  // Optimality oracle: no rotation sampled from SO(3) comes closer.
  RngStream stream(12);
  const double best = (r - m).norm();
  for (int t = 0; t < 1000000; ++t) {
    CHECK((random_rotation(stream).matrix() - m).norm() >= best - 1e-9);
  }
}

TEST_CASE("svdo_plus shrinks the distance to the clean rotation") {
  RngStream stream(13);
  for (int t = 0; t < 200; ++t) {
    const RotationMatrix r_star = random_rotation(stream);
    const Mat3 m = perturbed_matrix(r_star, 0.1, stream);
    CHECK((svdo_plus(m).matrix() - r_star.matrix()).norm() < (m - r_star.matrix()).norm());
  }
}

TEST_CASE("svdo_plus optimality against random candidate rotations") {
  RngStream stream(14);
  for (int t = 0; t < 1000; ++t) {
    const Mat3 m = gaussian_matrix(stream);
    const Mat3 proj = svdo_plus(m).matrix();
    const Mat3 cand = random_rotation(stream).matrix();
    CHECK((proj - m).norm() <= (cand - m).norm() + 1e-9);
  }
}

TEST_CASE("svdo_plus is equivariant on both sides") {
  RngStream stream(15);
  for (int t = 0; t < 200; ++t) {
    const Mat3 m = gaussian_matrix(stream);
    if (svd3(m).s[2] <= 1e-3) continue;
    const Mat3 r1 = random_rotation(stream).matrix();
    const Mat3 r2 = random_rotation(stream).matrix();
    const Mat3 lhs = svdo_plus(Mat3(r1 * m * r2)).matrix();
    const Mat3 rhs = r1 * svdo_plus(m).matrix() * r2;
    CHECK((lhs - rhs).norm() <= 1e-9);
  }
}

TEST_CASE("svdo_plus rejects the zero matrix") {
  CHECK_THROWS_AS(svdo_plus(Mat3::Zero()), DegenerateInput);
}

TEST_CASE("gram_schmidt examples") {
  CHECK((gram_schmidt({Vec3(1, 0, 0), Vec3(0, 1, 0)}).matrix() - Mat3::Identity()).norm() ==
        0.0);
  CHECK((gram_schmidt({Vec3(2, 0, 0), Vec3(1, 1, 0)}).matrix() - Mat3::Identity()).norm() <=
        1e-15);
}

TEST_CASE("gram_schmidt produces rotations with the first column along t1") {
  RngStream stream(16);
  for (int t = 0; t < 300; ++t) {
    SixDParams p;
    for (int i = 0; i < 3; ++i) p.t1[i] = stream.next_gaussian();
    for (int i = 0; i < 3; ++i) p.t2[i] = stream.next_gaussian();
    const Mat3 r = gram_schmidt(p).matrix();
    CHECK((r.transpose() * r - Mat3::Identity()).norm() <= 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.col(0).cross(p.t1.normalized()).norm() <= 1e-12);
  }
}

TEST_CASE("gram_schmidt is scale invariant") {
  RngStream stream(17);
  for (int t = 0; t < 100; ++t) {
    SixDParams p;
    for (int i = 0; i < 3; ++i) p.t1[i] = stream.next_gaussian();
    for (int i = 0; i < 3; ++i) p.t2[i] = stream.next_gaussian();
    const double a = 0.01 + 10.0 * stream.next_unit();
    const double b = 0.01 + 10.0 * stream.next_unit();
    const SixDParams scaled{a * p.t1, b * p.t2};
    CHECK((gram_schmidt(scaled).matrix() - gram_schmidt(p).matrix()).norm() <= 1e-12);
  }
}

TEST_CASE("gram_schmidt is left-equivariant but not right-equivariant") {
  RngStream stream(18);
  double worst_right = 0.0;
  for (int t = 0; t < 200; ++t) {
    SixDParams p;
    for (int i = 0; i < 3; ++i) p.t1[i] = stream.next_gaussian();
    for (int i = 0; i < 3; ++i) p.t2[i] = stream.next_gaussian();
    const Mat3 r1 = random_rotation(stream).matrix();
    const SixDParams rotated{r1 * p.t1, r1 * p.t2};
    CHECK((gram_schmidt(rotated).matrix() - r1 * gram_schmidt(p).matrix()).norm() <= 1e-9);

    // Right action: rotate the input frame of the stacked matrix instead.
    Mat3 m = Mat3::Zero();
    m.col(0) = p.t1;
    m.col(1) = p.t2;
    m.col(2) = p.t1.cross(p.t2);
    const Mat3 r2 = random_rotation(stream).matrix();
    const Mat3 mr2 = m * r2;
    const Mat3 lhs = gram_schmidt({mr2.col(0), mr2.col(1)}).matrix() * r2.transpose();
    worst_right = std::max(worst_right, (lhs - gram_schmidt(p).matrix()).norm());
  }
  CHECK(worst_right > 0.1);  // a genuine counterexample exists
}

TEST_CASE("gram_schmidt degenerate inputs") {
  CHECK_THROWS_AS(gram_schmidt({Vec3::Zero(), Vec3(0, 1, 0)}), DegenerateInput);
  CHECK_THROWS_AS(gram_schmidt({Vec3(1, 0, 0), Vec3(2, 0, 0)}), DegenerateInput);
  CHECK_THROWS_AS(gram_schmidt({Vec3(1e-13, 0, 0), Vec3(0, 1, 0)}), DegenerateInput);
}

TEST_CASE("frobenius_loss") {
  RngStream stream(19);
  const RotationMatrix r_star = random_rotation(stream);
  CHECK(frobenius_loss(r_star.matrix(), r_star) == 0.0);
  CHECK(frobenius_loss(Mat3::Identity(), RotationMatrix(rot_z(M_PI))) ==
        doctest::Approx(8.0).epsilon(1e-12));
  const Mat3 n = gaussian_matrix(stream);
  for (double sigma : {0.1, 0.5, 2.0}) {
    CHECK(frobenius_loss(r_star.matrix() + sigma * n, r_star) ==
          doctest::Approx(sigma * sigma * n.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("geodesic_distance") {
  const RotationMatrix eye = RotationMatrix::identity();
  CHECK(geodesic_distance(eye, eye) == 0.0);
  CHECK(geodesic_distance(eye, RotationMatrix(rot_z(M_PI / 2))) ==
        doctest::Approx(M_PI / 2).epsilon(1e-12));

  RngStream stream(20);
  for (int t = 0; t < 300; ++t) {
    const RotationMatrix a = random_rotation(stream);
    const RotationMatrix b = random_rotation(stream);
    const double d = geodesic_distance(a, b);
    CHECK(d == doctest::Approx(angle_via_quaternion(a.matrix(), b.matrix())).epsilon(1e-10));
    CHECK(d == geodesic_distance(b, a));
    CHECK(d >= 0.0);
    CHECK(d <= M_PI);
  }
}

TEST_CASE("geodesic_distance near the endpoints stays first-order accurate") {
  for (double angle : {1e-9, 1e-7, 1e-4}) {
    const double d =
        geodesic_distance(RotationMatrix::identity(), RotationMatrix(rot_z(angle)));
    CHECK(std::abs(d - angle) <= 1e-12 + 1e-9 * angle);
  }
  const double near_pi =
      geodesic_distance(RotationMatrix::identity(), RotationMatrix(rot_z(M_PI - 1e-7)));
  CHECK(std::abs(near_pi - (M_PI - 1e-7)) <= 1e-9);
}

TEST_CASE("singular_value_gap") {
  CHECK(singular_value_gap(Vec3(3.0, 2.0, 1.0).asDiagonal().toDenseMatrix()) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(singular_value_gap(Vec3(2.0, 1.0, -1.0).asDiagonal().toDenseMatrix()) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(singular_value_gap(Mat3::Identity()) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("tangent_normal_split") {
  RngStream stream(21);
  const RotationMatrix r_star = random_rotation(stream);
  SUBCASE("n equal to r_star gives a pure normal part") {
    const auto [a, s] = tangent_normal_split(r_star, r_star.matrix());
    CHECK(a.norm() <= 1e-14);
    CHECK((s - Mat3::Identity()).norm() <= 1e-14);
  }
  SUBCASE("antisymmetric n at the identity is pure tangent") {
    const Mat3 n = skew(Vec3(0.3, -0.7, 1.1));
    const auto [a, s] = tangent_normal_split(RotationMatrix::identity(), n);
    CHECK((a - n).norm() == 0.0);
    CHECK(s.norm() == 0.0);
  }
  SUBCASE("energy splits orthogonally") {
    for (int t = 0; t < 200; ++t) {
      const Mat3 n = gaussian_matrix(stream);
      const auto [a, s] = tangent_normal_split(r_star, n);
      CHECK((a + s - r_star.matrix().transpose() * n).norm() <= 1e-13);
      CHECK(std::abs((a.transpose() * s).trace()) <= 1e-12);
      CHECK(a.squaredNorm() + s.squaredNorm() ==
            doctest::Approx(n.squaredNorm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("first-order projection error identity at small noise") {
  RngStream stream(22);
  for (double sigma : {1e-3, 1e-4}) {
    for (int t = 0; t < 50; ++t) {
      const RotationMatrix r_star = random_rotation(stream);
      const Mat3 n = gaussian_matrix(stream);
      const Mat3 m = r_star.matrix() + sigma * n;
      const auto [a, s] = tangent_normal_split(r_star, n);
      const double lhs = (svdo_plus(m).matrix() - r_star.matrix()).squaredNorm();
      const double rhs = sigma * sigma * a.squaredNorm();
      CHECK(std::abs(lhs - rhs) <= 10.0 * sigma * rhs + 1e-30);
    }
  }
}

TEST_CASE("RotationMatrix validates on construction") {
  CHECK_THROWS_AS(RotationMatrix{Mat3(2.0 * Mat3::Identity())}, DegenerateInput);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  CHECK_THROWS_AS(RotationMatrix{reflection}, DegenerateInput);
}
