#include "humo/kinematics/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "humo/core/error.hpp"
#include "humo/kinematics/forward.hpp"

namespace humo {

namespace {

std::vector<double> moving_average(const std::vector<double>& x, int radius) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    const int r = std::min({radius, i, n - 1 - i});
    // Averaging deviations from the centre sample keeps flat stretches bit-exact.
    const double c = x[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (int j = i - r; j <= i + r; ++j) s += x[static_cast<std::size_t>(j)] - c;
    out[static_cast<std::size_t>(i)] = c + s / (2 * r + 1);
  }
  return out;
}

std::vector<double> unwrap(std::vector<double> a) {
  for (std::size_t i = 1; i < a.size(); ++i) {
    double d = a[i] - a[i - 1];
    while (d > std::numbers::pi) {
      a[i] -= 2 * std::numbers::pi;
      d -= 2 * std::numbers::pi;
    }
    while (d < -std::numbers::pi) {
      a[i] += 2 * std::numbers::pi;
      d += 2 * std::numbers::pi;
    }
  }
  return a;
}

}  // namespace

double min_keypoint_height(const MotionClip& clip, const RobotModel& model) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const Frame& f : clip.frames) {
    lowest = std::min(lowest, keypoint_positions(model, f).col(2).minCoeff());
  }
  return lowest;
}

MotionClip height_correct(const MotionClip& clip, const RobotModel& model) {
  if (clip.frames.empty()) throw ValidationError("height_correct: empty clip");
  const double lowest = min_keypoint_height(clip, model);
  MotionClip out = clip;
  if (std::abs(lowest) < 1e-12) return out;
  for (Frame& f : out.frames) f.root_pos.z() -= lowest;
  return out;
}

MotionClip smooth(const MotionClip& clip, int window) {
  if (window < 1 || window % 2 == 0) throw ValidationError("smooth: window must be odd and >= 1");
  if (static_cast<std::size_t>(window) > clip.size()) throw ValidationError("smooth: window longer than clip");
  MotionClip out = clip;
  if (window == 1) return out;
  const int radius = window / 2;
  const std::size_t T = clip.size();
  std::vector<double> channel(T);
  auto apply = [&](auto get, bool angular) {
    for (std::size_t t = 0; t < T; ++t) channel[t] = get(clip.frames[t]);
    std::vector<double> s = moving_average(angular ? unwrap(channel) : channel, radius);
    for (std::size_t t = 0; t < T; ++t) get(out.frames[t]) = angular ? wrap_angle(s[t]) : s[t];
  };
  for (int c = 0; c < 3; ++c) {
    apply([c](auto& f) -> auto& { return f.root_pos[c]; }, false);
    apply([c](auto& f) -> auto& { return f.root_rpy[c]; }, true);
  }
  for (std::size_t i = 0; i < clip.dof_count(); ++i) {
    apply([i](auto& f) -> auto& { return f.dofs[i]; }, false);
  }
  return out;
}

}  // namespace humo
