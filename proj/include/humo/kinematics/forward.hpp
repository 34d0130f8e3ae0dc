#pragma once

#include <vector>

#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/robot_model.hpp"

namespace humo {

/// World pose of every joint frame after applying its own rotation.
struct JointPoses {
  std::vector<Mat3> rotations;
  std::vector<Vec3> positions;
};

JointPoses joint_poses(const RobotModel& model, const Frame& frame);

KeypointFrame forward_kinematics(const RobotModel& model, const Frame& frame);

/// Keypoint positions only (skips the rpy extraction).
PointMatrix keypoint_positions(const RobotModel& model, const Frame& frame);

/// Frame at the model's calibration pose with the root at `root_pos`.
Frame tpose_frame(const RobotModel& model, const Vec3& root_pos = Vec3::Zero());

}  // namespace humo
