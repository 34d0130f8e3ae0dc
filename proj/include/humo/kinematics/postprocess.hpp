#pragma once

#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/robot_model.hpp"

namespace humo {

/// Lowest keypoint height over the whole clip.
double min_keypoint_height(const MotionClip& clip, const RobotModel& model);

/// Shifts every root height by one clip-global offset so the lowest keypoint touches z = 0.
MotionClip height_correct(const MotionClip& clip, const RobotModel& model);

/// Centered moving average with symmetric shrinking windows at the edges. Orientation
/// channels are averaged on the unwrapped sequence and rewrapped to (-pi, pi].
/// Throws ValidationError for even windows or windows longer than the clip.
MotionClip smooth(const MotionClip& clip, int window);

}  // namespace humo
