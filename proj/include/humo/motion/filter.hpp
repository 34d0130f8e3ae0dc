#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "humo/core/json_io.hpp"
#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/robot_model.hpp"

namespace humo {

/// Kinematic stand-in for a physics tracker: thresholds beyond which a clip is rejected.
struct FilterLimits {
  double max_dof_velocity = 12.0;       // rad/s
  double max_root_accel = 20.0;         // m/s^2
  double ground_penetration_tol = 0.01; // m

  void validate() const;
};

namespace rule {
inline constexpr const char* joint_limit = "joint_limit";
inline constexpr const char* dof_velocity = "dof_velocity";
inline constexpr const char* root_accel = "root_accel";
inline constexpr const char* ground_penetration = "ground_penetration";
}  // namespace rule

struct Violation {
  std::string rule;
  std::size_t frame = 0;
  double value = 0.0;
  double threshold = 0.0;
  std::optional<std::size_t> dof;
};

enum class Verdict { keep, reject };

struct FilterReport {
  std::string clip_id;
  Verdict verdict = Verdict::keep;
  std::vector<Violation> violations;
};

FilterReport feasibility_filter(const MotionClip& clip, const RobotModel& model,
                                const FilterLimits& limits = {});

/// One JSON object per line: the clip verdict followed by one line per violation.
std::string format_filter_report(const FilterReport& report);

enum class Defect { velocity_spike, limit_breach, ground_penetration };

const char* to_string(Defect defect);
Defect defect_from_string(const std::string& name);
/// Rule the filter is expected to fire for a defect.
const char* expected_rule(Defect defect);

struct InjectedClip {
  MotionClip clip;
  Defect defect;
  std::size_t frame = 0;
  std::optional<std::size_t> dof;
};

/// Copy of `clip` with exactly one labeled defect at a seeded frame.
InjectedClip inject_infeasible(const MotionClip& clip, Defect defect, std::uint64_t seed,
                               const RobotModel& model = default_robot_model(),
                               const FilterLimits& limits = {});

}  // namespace humo
