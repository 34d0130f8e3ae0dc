#pragma once

#include <span>
#include <string>

#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/representation.hpp"
#include "humo/motion/norm.hpp"
#include "humo/tokenizer/model.hpp"

namespace humo {

struct DecodedMotion {
  MotionClip clip;
  RowMatrix rows;  // denormalized representation rows
  /// Mean distance (m) between the decoded keypoint channels and FK of the decoded frames.
  double consistency = 0.0;
};

/// Motion ids -> decoder -> denormalized rows -> frames. Throws ValidationError for an
/// empty list or ids outside the codebook.
DecodedMotion decode_motion(std::span<const int> ids, const Tokenizer& tokenizer, const NormStats& stats,
                            const RobotModel& model, double fps = 30.0);

}  // namespace humo
