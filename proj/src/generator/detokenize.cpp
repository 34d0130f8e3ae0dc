#include "humo/generator/detokenize.hpp"

#include "humo/core/error.hpp"
#include "humo/kinematics/forward.hpp"

namespace humo {

DecodedMotion decode_motion(std::span<const int> ids, const Tokenizer& tokenizer, const NormStats& stats,
                            const RobotModel& model, double fps) {
  if (ids.empty()) throw ValidationError("decode: empty token list");
  const std::vector<int> tokens(ids.begin(), ids.end());
  const std::size_t frames = tokens.size() * tokenizer.config().downsample_factor;
  DecodedMotion out;
  out.rows = denormalize(tokenizer.detokenize(tokens, frames), stats);
  out.clip.fps = fps;
  out.clip.frames = rows_to_frames(out.rows, model);
  const FeatureLayout layout(model);
  const std::size_t n = model.keypoint_count();
  double total = 0.0;
  for (std::size_t f = 0; f < out.clip.frames.size(); ++f) {
    const PointMatrix fk = keypoint_positions(model, out.clip.frames[f]);
    for (std::size_t k = 0; k < n; ++k) {
      const auto c = static_cast<Eigen::Index>(layout.keypoint_pos + 3 * k);
      total += (out.rows.row(static_cast<Eigen::Index>(f)).segment<3>(c) - fk.row(static_cast<Eigen::Index>(k))).norm();
    }
  }
  out.consistency = total / static_cast<double>(frames * n);
  return out;
}

}  // namespace humo
