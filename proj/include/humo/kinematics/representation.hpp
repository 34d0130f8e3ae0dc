#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/robot_model.hpp"

namespace humo {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Width of one representation row: root_pos(3) + root_rpy(3) + dofs(d) + keypoint
/// positions(3n) + keypoint orientations(3n).
std::size_t feature_dim(std::size_t dof_count, std::size_t keypoint_count);
std::size_t feature_dim(const RobotModel& model);

/// Column ranges inside a representation row.
struct FeatureLayout {
  std::size_t root_pos = 0;
  std::size_t root_rpy = 3;
  std::size_t dofs = 6;
  std::size_t keypoint_pos = 0;
  std::size_t keypoint_rpy = 0;
  std::size_t dim = 0;

  explicit FeatureLayout(const RobotModel& model);
};

std::vector<double> assemble_representation(const Frame& frame, const KeypointFrame& keypoints);

std::pair<Frame, KeypointFrame> disassemble_representation(std::span<const double> row,
                                                           const RobotModel& model);

/// One representation row per frame, keypoints from forward kinematics.
RowMatrix clip_to_rows(const RobotModel& model, const MotionClip& clip);

/// Frames read back from representation rows (keypoint channels dropped).
std::vector<Frame> rows_to_frames(const RowMatrix& rows, const RobotModel& model);

}  // namespace humo
