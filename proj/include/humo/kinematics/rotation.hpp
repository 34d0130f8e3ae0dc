#pragma once

#include <Eigen/Core>

namespace humo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// R = Rz(yaw) * Ry(pitch) * Rx(roll), input ordered (roll, pitch, yaw).
Mat3 rpy_to_matrix(const Vec3& rpy);

/// Inverse of rpy_to_matrix. Pitch is returned in [-pi/2, pi/2]; at gimbal lock
/// (|pitch| within 1e-7 of pi/2) roll is 0 and yaw carries the remaining rotation.
/// Throws ValidationError if R is not a proper rotation within 1e-6.
Vec3 matrix_to_rpy(const Mat3& R);

/// Rotation by `angle` radians about unit `axis`.
Mat3 axis_angle(const Vec3& axis, double angle);

/// Wraps to (-pi, pi].
double wrap_angle(double a);

}  // namespace humo
