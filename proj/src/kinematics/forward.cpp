#include "humo/kinematics/forward.hpp"

#include <cmath>

#include "humo/core/error.hpp"

namespace humo {

const char* to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::synthetic: return "synthetic";
    case SourceTag::retargeted: return "retargeted";
    case SourceTag::external: return "external";
  }
  return "external";
}

SourceTag source_tag_from_string(const std::string& s) {
  if (s == "synthetic") return SourceTag::synthetic;
  if (s == "retargeted") return SourceTag::retargeted;
  if (s == "external") return SourceTag::external;
  throw ParseError("unknown source_tag '" + s + "'");
}

void validate_clip(const MotionClip& clip) {
  if (!(clip.fps > 0.0)) throw ValidationError("clip " + clip.id + ": fps must be positive");
  if (clip.frames.size() < 2) throw ValidationError("clip " + clip.id + ": needs at least 2 frames");
  const std::size_t d = clip.frames.front().dofs.size();
  for (const Frame& f : clip.frames) {
    if (f.dofs.size() != d) throw ValidationError("clip " + clip.id + ": inconsistent dof count");
    if (!f.root_pos.allFinite() || !f.root_rpy.allFinite()) {
      throw ValidationError("clip " + clip.id + ": non-finite root");
    }
    for (double q : f.dofs) {
      if (!std::isfinite(q)) throw ValidationError("clip " + clip.id + ": non-finite dof");
    }
  }
}

JointPoses joint_poses(const RobotModel& model, const Frame& frame) {
  const std::size_t d = model.dof_count();
  if (frame.dofs.size() != d) {
    throw DimensionError("forward_kinematics: frame has " + std::to_string(frame.dofs.size()) +
                         " dofs, model has " + std::to_string(d));
  }
  const Mat3 root_R = rpy_to_matrix(frame.root_rpy);
  JointPoses poses;
  poses.rotations.resize(d);
  poses.positions.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const JointSpec& j = model.joints[i];
    const Mat3& pR = j.parent ? poses.rotations[*j.parent] : root_R;
    const Vec3& pp = j.parent ? poses.positions[*j.parent] : frame.root_pos;
    poses.positions[i] = pp + pR * j.offset;
    poses.rotations[i] = pR * axis_angle(j.axis, frame.dofs[i]);
  }
  return poses;
}

PointMatrix keypoint_positions(const RobotModel& model, const Frame& frame) {
  const JointPoses poses = joint_poses(model, frame);
  const Mat3 root_R = rpy_to_matrix(frame.root_rpy);
  PointMatrix out(model.keypoint_count(), 3);
  for (std::size_t k = 0; k < model.keypoint_count(); ++k) {
    const KeypointBinding& b = model.keypoint_bindings[k];
    const Mat3& R = b.joint ? poses.rotations[*b.joint] : root_R;
    const Vec3& p = b.joint ? poses.positions[*b.joint] : frame.root_pos;
    out.row(static_cast<Eigen::Index>(k)) = (p + R * b.local_offset).transpose();
  }
  return out;
}

KeypointFrame forward_kinematics(const RobotModel& model, const Frame& frame) {
  const JointPoses poses = joint_poses(model, frame);
  const Mat3 root_R = rpy_to_matrix(frame.root_rpy);
  const auto n = static_cast<Eigen::Index>(model.keypoint_count());
  KeypointFrame kf{PointMatrix(n, 3), PointMatrix(n, 3)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const KeypointBinding& b = model.keypoint_bindings[static_cast<std::size_t>(k)];
    const Mat3& R = b.joint ? poses.rotations[*b.joint] : root_R;
    const Vec3& p = b.joint ? poses.positions[*b.joint] : frame.root_pos;
    kf.positions.row(k) = (p + R * b.local_offset).transpose();
    kf.orientations_rpy.row(k) = matrix_to_rpy(R).transpose();
  }
  return kf;
}

Frame tpose_frame(const RobotModel& model, const Vec3& root_pos) {
  Frame f;
  f.root_pos = root_pos;
  f.dofs = model.tpose_dofs;
  return f;
}

}  // namespace humo
