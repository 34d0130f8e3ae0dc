#pragma once

#include <string>
#include <vector>

#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/robot_model.hpp"

namespace humo {

/// Scale for one keypoint-to-parent edge: robot length / source length.
struct SegmentScale {
  std::size_t child = 0;
  std::size_t parent = 0;
  double scale = 1.0;
};

/// Throws ValidationError on a source segment shorter than 1e-6 m or a row-count mismatch.
std::vector<SegmentScale> tpose_scale_calibration(const RobotModel& model,
                                                  const PointMatrix& source_tpose_keypoints);

struct IkConfig {
  double damping = 0.01;  // lambda in (J J^T + lambda^2 I)
  double tol = 1e-4;      // mean keypoint error, meters
  int max_iters = 100;
};

struct IkResult {
  Frame frame;
  double residual = 0.0;  // mean keypoint position error of `frame`
  int iterations = 0;
  bool converged = false;
};

/// Damped least squares over root pose and active DoFs; inactive DoFs keep their init
/// values. Never throws on non-convergence: the best frame seen is returned.
IkResult retarget_ik(const RobotModel& model, const PointMatrix& targets, const Frame& init,
                     const IkConfig& config = {});

/// Keypoint trajectory of a source skeleton sharing the model's keypoint topology.
struct KeypointTrajectory {
  double fps = 30.0;
  std::string id;
  std::string text;
  PointMatrix tpose;
  std::vector<PointMatrix> frames;
};

/// Rescales source keypoints onto robot proportions, segment by segment down the
/// keypoint tree. Root keypoints are scaled by the mean segment scale.
PointMatrix apply_segment_scales(const RobotModel& model, const std::vector<SegmentScale>& scales,
                                 const PointMatrix& source);

struct RetargetConfig {
  IkConfig ik;
  int smooth_window = 5;
};

struct RetargetReport {
  double mean_residual = 0.0;
  double max_residual = 0.0;
  std::size_t unconverged_frames = 0;
};

/// Calibration, per-frame IK (warm-started from the previous frame), height correction
/// and smoothing.
MotionClip retarget_trajectory(const RobotModel& model, const KeypointTrajectory& source,
                               const RetargetConfig& config, RetargetReport* report = nullptr);

}  // namespace humo
