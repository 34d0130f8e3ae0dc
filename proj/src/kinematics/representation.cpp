#include "humo/kinematics/representation.hpp"

#include "humo/core/error.hpp"
#include "humo/kinematics/forward.hpp"

namespace humo {

std::size_t feature_dim(std::size_t dof_count, std::size_t keypoint_count) {
  return 6 + dof_count + 6 * keypoint_count;
}

std::size_t feature_dim(const RobotModel& model) {
  return feature_dim(model.dof_count(), model.keypoint_count());
}

FeatureLayout::FeatureLayout(const RobotModel& model)
    : keypoint_pos(6 + model.dof_count()),
      keypoint_rpy(6 + model.dof_count() + 3 * model.keypoint_count()),
      dim(feature_dim(model)) {}

std::vector<double> assemble_representation(const Frame& frame, const KeypointFrame& keypoints) {
  const auto n = keypoints.positions.rows();
  if (keypoints.orientations_rpy.rows() != n) {
    throw DimensionError("assemble_representation: keypoint position/orientation counts differ");
  }
  std::vector<double> row;
  row.reserve(feature_dim(frame.dofs.size(), static_cast<std::size_t>(n)));
  for (int i = 0; i < 3; ++i) row.push_back(frame.root_pos[i]);
  for (int i = 0; i < 3; ++i) row.push_back(frame.root_rpy[i]);
  row.insert(row.end(), frame.dofs.begin(), frame.dofs.end());
  for (Eigen::Index k = 0; k < n; ++k)
    for (int c = 0; c < 3; ++c) row.push_back(keypoints.positions(k, c));
  for (Eigen::Index k = 0; k < n; ++k)
    for (int c = 0; c < 3; ++c) row.push_back(keypoints.orientations_rpy(k, c));
  return row;
}

std::pair<Frame, KeypointFrame> disassemble_representation(std::span<const double> row,
                                                           const RobotModel& model) {
  const std::size_t d = model.dof_count();
  const std::size_t n = model.keypoint_count();
  if (row.size() != feature_dim(d, n)) {
    throw DimensionError("disassemble_representation: row length " + std::to_string(row.size()) +
                         ", expected " + std::to_string(feature_dim(d, n)));
  }
  Frame f;
  f.root_pos = Vec3(row[0], row[1], row[2]);
  f.root_rpy = Vec3(row[3], row[4], row[5]);
  f.dofs.assign(row.begin() + 6, row.begin() + 6 + static_cast<std::ptrdiff_t>(d));
  const auto ni = static_cast<Eigen::Index>(n);
  KeypointFrame kf{PointMatrix(ni, 3), PointMatrix(ni, 3)};
  std::size_t at = 6 + d;
  for (Eigen::Index k = 0; k < ni; ++k)
    for (int c = 0; c < 3; ++c) kf.positions(k, c) = row[at++];
  for (Eigen::Index k = 0; k < ni; ++k)
    for (int c = 0; c < 3; ++c) kf.orientations_rpy(k, c) = row[at++];
  return {std::move(f), std::move(kf)};
}

RowMatrix clip_to_rows(const RobotModel& model, const MotionClip& clip) {
  const std::size_t D = feature_dim(model);
  RowMatrix rows(static_cast<Eigen::Index>(clip.size()), static_cast<Eigen::Index>(D));
  for (std::size_t t = 0; t < clip.size(); ++t) {
    const Frame& f = clip.frames[t];
    const std::vector<double> row = assemble_representation(f, forward_kinematics(model, f));
    for (std::size_t c = 0; c < D; ++c) rows(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = row[c];
  }
  return rows;
}

std::vector<Frame> rows_to_frames(const RowMatrix& rows, const RobotModel& model) {
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index t = 0; t < rows.rows(); ++t) {
    std::span<const double> row(rows.row(t).data(), static_cast<std::size_t>(rows.cols()));
    frames.push_back(disassemble_representation(row, model).first);
  }
  return frames;
}

}  // namespace humo
