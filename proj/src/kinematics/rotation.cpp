#include "humo/kinematics/rotation.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "humo/core/error.hpp"

namespace humo {

Mat3 rpy_to_matrix(const Vec3& rpy) {
  const double cr = std::cos(rpy.x()), sr = std::sin(rpy.x());
  const double cp = std::cos(rpy.y()), sp = std::sin(rpy.y());
  const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
  Mat3 R;
  R << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
       -sp,     cp * sr,                cp * cr;
  return R;
}

Vec3 matrix_to_rpy(const Mat3& R) {
  const double ortho = (R.transpose() * R - Mat3::Identity()).norm();
  if (!std::isfinite(ortho) || ortho > 1e-6 || R.determinant() < 0.0) {
    throw ValidationError("matrix_to_rpy: input is not a rotation matrix");
  }
  const double pitch = std::atan2(-R(2, 0), std::hypot(R(0, 0), R(1, 0)));
  if (std::numbers::pi / 2 - std::abs(pitch) < 1e-7) {
    const double p = pitch > 0 ? std::numbers::pi / 2 : -std::numbers::pi / 2;
    return Vec3(0.0, p, std::atan2(-R(0, 1), R(1, 1)));
  }
  return Vec3(std::atan2(R(2, 1), R(2, 2)), pitch, std::atan2(R(1, 0), R(0, 0)));
}

Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

double wrap_angle(double a) {
  if (a > -std::numbers::pi && a <= std::numbers::pi) return a;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, two_pi);
  if (w < 0) w += two_pi;
  w -= std::numbers::pi;
  // Result so far is in [-pi, pi); move the closed end to +pi.
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

}  // namespace humo
