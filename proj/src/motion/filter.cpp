#include "humo/motion/filter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"
#include "humo/kinematics/forward.hpp"

namespace humo {

void FilterLimits::validate() const {
  if (!(max_dof_velocity > 0 && max_root_accel > 0 && ground_penetration_tol > 0)) {
    throw ValidationError("filter limits must all be positive");
  }
}

FilterReport feasibility_filter(const MotionClip& clip, const RobotModel& model, const FilterLimits& limits) {
  FilterReport report;
  report.clip_id = clip.id;
  const std::size_t T = clip.size();
  const std::size_t d = model.dof_count();
  const double dt2 = clip.fps * clip.fps;
  for (std::size_t t = 0; t < T; ++t) {
    const Frame& f = clip.frames[t];
    if (f.dofs.size() != d) throw DimensionError("feasibility_filter: dof count mismatch");
    for (std::size_t i = 0; i < d; ++i) {
      const JointSpec& j = model.joints[i];
      if (f.dofs[i] > j.hi) report.violations.push_back({rule::joint_limit, t, f.dofs[i], j.hi, i});
      if (f.dofs[i] < j.lo) report.violations.push_back({rule::joint_limit, t, f.dofs[i], j.lo, i});
    }
    if (t >= 1) {
      const Frame& prev = clip.frames[t - 1];
      for (std::size_t i = 0; i < d; ++i) {
        const double v = std::abs(f.dofs[i] - prev.dofs[i]) * clip.fps;
        if (v > limits.max_dof_velocity) {
          report.violations.push_back({rule::dof_velocity, t, v, limits.max_dof_velocity, i});
        }
      }
    }
    if (t >= 1 && t + 1 < T) {
      const Vec3 acc = (clip.frames[t + 1].root_pos - 2.0 * f.root_pos + clip.frames[t - 1].root_pos) * dt2;
      if (acc.norm() > limits.max_root_accel) {
        report.violations.push_back({rule::root_accel, t, acc.norm(), limits.max_root_accel, std::nullopt});
      }
    }
    const double lowest = keypoint_positions(model, f).col(2).minCoeff();
    if (lowest < -limits.ground_penetration_tol) {
      report.violations.push_back({rule::ground_penetration, t, lowest, -limits.ground_penetration_tol, std::nullopt});
    }
  }
  report.verdict = report.violations.empty() ? Verdict::keep : Verdict::reject;
  return report;
}

std::string format_filter_report(const FilterReport& report) {
  std::ostringstream out;
  Json head = {{"clip_id", report.clip_id},
               {"verdict", report.verdict == Verdict::keep ? "keep" : "reject"},
               {"violations", report.violations.size()}};
  out << head.dump() << "\n";
  for (const Violation& v : report.violations) {
    Json line = {{"rule", v.rule}, {"frame", v.frame}, {"value", v.value}, {"threshold", v.threshold}};
    if (v.dof) line["dof"] = *v.dof;
    out << line.dump() << "\n";
  }
  return out.str();
}

const char* to_string(Defect defect) {
  switch (defect) {
    case Defect::velocity_spike: return "velocity_spike";
    case Defect::limit_breach: return "limit_breach";
    case Defect::ground_penetration: return "ground_penetration";
  }
  return "velocity_spike";
}

Defect defect_from_string(const std::string& name) {
  for (auto d : {Defect::velocity_spike, Defect::limit_breach, Defect::ground_penetration})
    if (name == to_string(d)) return d;
  throw ValidationError("unknown defect '" + name + "'");
}

const char* expected_rule(Defect defect) {
  switch (defect) {
    case Defect::velocity_spike: return rule::dof_velocity;
    case Defect::limit_breach: return rule::joint_limit;
    case Defect::ground_penetration: return rule::ground_penetration;
  }
  return rule::dof_velocity;
}

InjectedClip inject_infeasible(const MotionClip& clip, Defect defect, std::uint64_t seed, const RobotModel& model,
                               const FilterLimits& limits) {
  validate_clip(clip);
  if (clip.size() < 8) throw ValidationError("inject_infeasible: clip too short");
  Rng rng(seed, 0xdefec7);
  InjectedClip out{clip, defect, 0, std::nullopt};
  out.frame = 2 + rng.below(clip.size() - 6);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < model.dof_count(); ++i)
    if (model.active_dof_mask[i]) active.push_back(i);
  Frame& f = out.clip.frames[out.frame];
  switch (defect) {
    case Defect::velocity_spike: {
      const std::size_t i = active[rng.below(active.size())];
      const double step = 2.0 * limits.max_dof_velocity / clip.fps;
      const JointSpec& j = model.joints[i];
      // Spike toward whichever side keeps the value inside the limits.
      f.dofs[i] += f.dofs[i] + step <= j.hi ? step : -step;
      out.dof = i;
      break;
    }
    case Defect::limit_breach: {
      const std::size_t i = active[rng.below(active.size())];
      f.dofs[i] = model.joints[i].hi + 0.1;
      out.dof = i;
      break;
    }
    case Defect::ground_penetration: {
      for (std::size_t t = out.frame; t < out.frame + 3; ++t) {
        Frame& g = out.clip.frames[t];
        const double lowest = keypoint_positions(model, g).col(2).minCoeff();
        g.root_pos.z() -= lowest + 0.05;
      }
      break;
    }
  }
  return out;
}

}  // namespace humo
