#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "humo/core/json_io.hpp"
#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/representation.hpp"
#include "humo/kinematics/robot_model.hpp"

namespace humo {

/// Mean Euclidean distance between corresponding points of equally sized point sets.
double mean_point_error(std::span<const PointMatrix> pred, std::span<const PointMatrix> ref);

/// Joint world positions per frame with the root translation subtracted.
std::vector<PointMatrix> root_aligned_joints(const RobotModel& model, const MotionClip& clip);
std::vector<PointMatrix> root_aligned_keypoints(const RobotModel& model, const MotionClip& clip);

/// Meters, averaged over every frame and joint of every clip pair. Throws DimensionError
/// when clip counts or frame counts differ.
double mpjpe(std::span<const MotionClip> pred, std::span<const MotionClip> ref, const RobotModel& model);
double mpkpe(std::span<const MotionClip> pred, std::span<const MotionClip> ref, const RobotModel& model);

/// Mean absolute error over every channel.
double l1_metric(const RowMatrix& pred, const RowMatrix& ref);

/// Mean keypoint-position error measured on normalized representation rows: the keypoint
/// position channels are read as xyz triplets.
double normalized_mpjpe(const RowMatrix& pred, const RowMatrix& ref, const FeatureLayout& layout,
                        std::size_t keypoint_count);

struct MetricReport {
  std::optional<double> mpjpe;
  std::optional<double> mpkpe;
  std::optional<double> l1;
  std::optional<double> normalized_mpjpe;
  std::optional<double> usage;
  std::optional<double> fid;
  std::map<int, double> r_at;

  /// Throws ValidationError on non-finite values or fractions outside [0, 1].
  void validate() const;
};

Json metric_report_to_json(const MetricReport& report);
MetricReport metric_report_from_json(const Json& j);

}  // namespace humo
