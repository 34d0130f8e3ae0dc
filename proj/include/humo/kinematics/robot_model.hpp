#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "humo/core/json_io.hpp"
#include "humo/kinematics/rotation.hpp"

namespace humo {

/// One revolute degree of freedom. `parent` empty means the joint hangs off the floating base.
struct JointSpec {
  std::string name;
  std::optional<std::size_t> parent;
  Vec3 offset = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double lo = 0.0;
  double hi = 0.0;
};

/// A virtual keypoint rigidly attached to a joint frame (or to the floating base when
/// `joint` is empty). `parent` gives the keypoint skeleton used for T-pose scaling.
struct KeypointBinding {
  std::string name;
  std::optional<std::size_t> joint;
  std::optional<std::size_t> parent;
  Vec3 local_offset = Vec3::Zero();
};

struct RobotModel {
  std::string name;
  std::vector<JointSpec> joints;
  std::vector<KeypointBinding> keypoint_bindings;
  std::vector<bool> active_dof_mask;
  std::vector<double> tpose_dofs;

  std::size_t dof_count() const { return joints.size(); }
  std::size_t keypoint_count() const { return keypoint_bindings.size(); }
  std::size_t active_dof_count() const;

  /// Throws ValidationError describing the first violated invariant.
  void validate() const;
};

constexpr int kRobotModelFormatVersion = 1;

/// Parses and validates a model document (JSON). Throws ParseError / ValidationError.
RobotModel load_robot_model(std::string_view document);
RobotModel load_robot_model_file(const std::string& path);
Json robot_model_to_json(const RobotModel& model);

/// Content hash of the canonical serialization; stamped into motion and checkpoint files.
std::string model_hash(const RobotModel& model);

/// The bundled 29-DoF / 17-keypoint humanoid.
const RobotModel& default_robot_model();
std::string_view default_robot_model_document();

}  // namespace humo
