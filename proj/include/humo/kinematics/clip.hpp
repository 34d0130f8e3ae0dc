#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "humo/kinematics/rotation.hpp"

namespace humo {

/// Robot state at one instant: floating-base pose plus one angle per DoF.
struct Frame {
  Vec3 root_pos = Vec3::Zero();
  Vec3 root_rpy = Vec3::Zero();
  std::vector<double> dofs;

  bool operator==(const Frame&) const = default;
};

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

/// World poses of the virtual keypoints (n x 3 each).
struct KeypointFrame {
  PointMatrix positions;
  PointMatrix orientations_rpy;

  bool operator==(const KeypointFrame& o) const {
    return positions == o.positions && orientations_rpy == o.orientations_rpy;
  }
};

enum class SourceTag { synthetic, retargeted, external };

const char* to_string(SourceTag tag);
SourceTag source_tag_from_string(const std::string& s);

struct MotionClip {
  double fps = 30.0;
  std::vector<Frame> frames;
  std::string text;
  std::string id;
  SourceTag source_tag = SourceTag::synthetic;

  std::size_t size() const { return frames.size(); }
  std::size_t dof_count() const { return frames.empty() ? 0 : frames.front().dofs.size(); }

  bool operator==(const MotionClip&) const = default;
};

/// Throws ValidationError if fps <= 0, fewer than 2 frames, inconsistent dof counts or
/// non-finite values.
void validate_clip(const MotionClip& clip);

}  // namespace humo
