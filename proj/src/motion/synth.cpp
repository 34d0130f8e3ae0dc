#include "humo/motion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"

namespace humo {

namespace {

constexpr double kPi = std::numbers::pi;
// Hip-to-knee plus knee-to-ankle length of the bundled model.
constexpr double kLegLength = 0.60;

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

// Ramps 0 -> 1 over `ramp` seconds at the start and back to 0 at the end.
double envelope(double t, double T, double ramp) {
  ramp = std::min(ramp, T / 4.0);
  return smoothstep(t / ramp) * smoothstep((T - t) / ramp);
}

struct Rig {
  const RobotModel& model;
  std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < model.joints.size(); ++i)
      if (model.joints[i].name == name) return i;
    throw ValidationError("synth: model lacks joint '" + name + "'");
  }
};

struct Pose {
  Rig rig;
  Frame frame;

  double& q(const std::string& name) { return frame.dofs[rig.index(name)]; }
  const char* side_name(Side s) const { return s == Side::left ? "left" : "right"; }

  // Flexes one leg keeping the foot parallel to the ground.
  void flex_leg(Side s, double a) {
    const std::string p = side_name(s);
    q(p + "_hip_pitch") += -a;
    q(p + "_knee") += 2.0 * a;
    q(p + "_ankle_pitch") += -a;
  }

  // Lowers the hip by kLegLength * (1 - cos a), the drop of flex_leg(a), with flat and
  // planted feet. The shin tilts by only 0.6 a so the ankle stays inside its pitch range;
  // the thigh takes the rest and the pelvis moves back. Returns that backward shift.
  double squat_leg(Side s, double a) {
    const double half = kLegLength / 2.0;
    const double drop = kLegLength * (1.0 - std::cos(a));
    const double shin = 0.6 * a;
    const double thigh = std::acos(std::clamp((kLegLength - drop) / half - std::cos(shin), -1.0, 1.0));
    const std::string p = side_name(s);
    q(p + "_hip_pitch") += -thigh;
    q(p + "_knee") += thigh + shin;
    q(p + "_ankle_pitch") += -shin;
    return half * (std::sin(thigh) - std::sin(shin));
  }
};

struct Segment {
  Vec3 start_pos = Vec3(0.0, 0.0, kStandingRootHeight);
  double start_yaw = 0.0;
};

Frame base_pose(const RobotModel& model, std::uint64_t seed) {
  Pose p{Rig{model}, Frame{}};
  p.frame.dofs.assign(model.dof_count(), 0.0);
  Rng rng(seed, 0xba5e);
  p.q("left_shoulder_roll") = -1.40 + rng.uniform(-0.05, 0.05);
  p.q("right_shoulder_roll") = 1.40 + rng.uniform(-0.05, 0.05);
  p.q("left_elbow") = 0.30 + rng.uniform(-0.1, 0.1);
  p.q("right_elbow") = 0.30 + rng.uniform(-0.1, 0.1);
  p.q("waist_pitch") = rng.uniform(-0.03, 0.03);
  return p.frame;
}

std::string times_word(int n) {
  switch (n) {
    case 1: return "once";
    case 2: return "twice";
    case 3: return "three times";
    case 4: return "four times";
    default: return std::to_string(n) + " times";
  }
}

std::string predicate(MotionFamily family, const SynthParams& p) {
  switch (family) {
    case MotionFamily::stand:
      return "stands still";
    case MotionFamily::squat: {
      std::string s = "squats down " + times_word(p.reps);
      if (p.depth > 0.31) s = "squats down deeply " + times_word(p.reps);
      if (p.depth < 0.17) s = "squats down slightly " + times_word(p.reps);
      return s;
    }
    case MotionFamily::wave: {
      std::string hand = p.side == Side::both ? "both hands" : std::string(p.side == Side::left ? "its left hand" : "its right hand");
      return "waves " + hand + " " + times_word(p.reps);
    }
    case MotionFamily::walk_in_place: {
      std::string s = "walks in place";
      if (p.cadence > 1.8) s += " quickly";
      if (p.cadence < 1.3) s += " slowly";
      if (p.amplitude > 0.55) s += " with high knees";
      return s;
    }
    case MotionFamily::turn: {
      const std::string dir = p.turn_deg > 0 ? "left" : "right";
      const double a = std::abs(p.turn_deg);
      if (a >= 135.0) return "turns around to the " + dir;
      if (a <= 60.0) return "turns slightly " + dir;
      return "turns " + dir;
    }
    case MotionFamily::compose: {
      std::string s;
      for (std::size_t i = 0; i < p.parts.size(); ++i) {
        const std::string part = predicate(p.parts[i].family, p.parts[i].params);
        if (i == 0) {
          s = part;
        } else if (i + 1 == p.parts.size()) {
          s += (p.parts.size() > 2 ? ", and then " : " and then ") + part;
        } else {
          s += ", then " + part;
        }
      }
      return s;
    }
  }
  return "moves";
}

void validate_params(MotionFamily family, const SynthParams& p) {
  switch (family) {
    case MotionFamily::squat:
      if (!(p.depth > 0.0 && p.depth <= 0.45)) throw ValidationError("squat: depth must be in (0, 0.45]");
      if (p.reps < 1) throw ValidationError("squat: reps must be >= 1");
      break;
    case MotionFamily::wave:
      if (p.reps < 1) throw ValidationError("wave: reps must be >= 1");
      if (!(p.amplitude > 0.0 && p.amplitude <= 1.0)) throw ValidationError("wave: amplitude must be in (0, 1]");
      break;
    case MotionFamily::walk_in_place:
      if (!(p.cadence > 0.0 && p.cadence <= 2.5)) throw ValidationError("walk: cadence must be in (0, 2.5]");
      if (!(p.amplitude > 0.0 && p.amplitude <= 0.8)) throw ValidationError("walk: amplitude must be in (0, 0.8]");
      break;
    case MotionFamily::turn:
      if (std::abs(p.turn_deg) > 360.0) throw ValidationError("turn: |turn_deg| must be <= 360");
      break;
    case MotionFamily::compose:
      if (p.parts.size() < 2 || p.parts.size() > 4) throw ValidationError("compose: needs 2-4 parts");
      for (const ComposePart& part : p.parts) {
        if (part.family == MotionFamily::compose) throw ValidationError("compose: parts must be atomic");
        if (!(part.weight > 0.0)) throw ValidationError("compose: part weights must be positive");
        validate_params(part.family, part.params);
      }
      break;
    case MotionFamily::stand:
      break;
  }
}

// Pose of an atomic family at time t of a segment lasting T seconds.
Frame atomic_frame(MotionFamily family, const SynthParams& p, const Frame& base, const RobotModel& model,
                   const Segment& seg, double t, double T, double phase) {
  Pose pose{Rig{model}, base};
  Frame& f = pose.frame;
  Vec3 pos = seg.start_pos;
  double yaw = seg.start_yaw;
  auto step_in_place = [&](double cadence, double amp, double env) {
    const double s = std::sin(kPi * cadence * t);
    const double left = s > 0 ? s * s : 0.0;
    const double right = s < 0 ? s * s : 0.0;
    pose.flex_leg(Side::left, env * amp * left);
    pose.flex_leg(Side::right, env * amp * right);
    pose.q("left_shoulder_pitch") += env * 0.5 * amp * s;
    pose.q("right_shoulder_pitch") += -env * 0.5 * amp * s;
  };
  switch (family) {
    case MotionFamily::stand:
      pose.q("waist_pitch") += 0.004 * std::sin(2.0 * kPi * 0.25 * t + phase);
      break;
    case MotionFamily::squat: {
      const double w = 2.0 * kPi * p.reps / T;
      // Smooth in angle space; the drop follows and bottoms out at exactly p.depth.
      const double a_max = std::acos(1.0 - p.depth / kLegLength);
      const double a = a_max * 0.5 * (1.0 - std::cos(w * t));
      const double drop = kLegLength * (1.0 - std::cos(a));
      const double back = pose.squat_leg(Side::left, a);
      pose.squat_leg(Side::right, a);
      pos -= back * Vec3(std::cos(yaw), std::sin(yaw), 0.0);
      const double frac = drop / p.depth;
      pose.q("left_shoulder_pitch") += -1.0 * frac;
      pose.q("right_shoulder_pitch") += -1.0 * frac;
      pose.q("waist_pitch") += 0.25 * frac;
      pos.z() -= drop;
      break;
    }
    case MotionFamily::wave: {
      const double env = envelope(t, T, 0.6);
      const double osc = std::sin(2.0 * kPi * p.reps * t / T);
      auto wave_arm = [&](Side s) {
        const std::string n = s == Side::left ? "left" : "right";
        const double sign = s == Side::left ? 1.0 : -1.0;
        double& roll = pose.q(n + "_shoulder_roll");
        roll += env * (sign * 0.4 - roll);
        double& elbow = pose.q(n + "_elbow");
        elbow += env * (1.2 - elbow);
        pose.q(n + "_shoulder_yaw") += env * p.amplitude * osc;
      };
      if (p.side != Side::right) wave_arm(Side::left);
      if (p.side != Side::left) wave_arm(Side::right);
      break;
    }
    case MotionFamily::walk_in_place:
      step_in_place(p.cadence, p.amplitude, envelope(t, T, 0.3));
      break;
    case MotionFamily::turn:
      yaw += p.turn_deg * kPi / 180.0 * smoothstep(t / T);
      step_in_place(1.6, 0.25, envelope(t, T, 0.3));
      break;
    case MotionFamily::compose:
      break;
  }
  f.root_pos = pos;
  f.root_rpy = Vec3(0.0, 0.0, wrap_angle(yaw));
  return f;
}

double end_yaw(MotionFamily family, const SynthParams& p, double start) {
  return family == MotionFamily::turn ? start + p.turn_deg * kPi / 180.0 : start;
}

Frame lerp_frames(const Frame& a, const Frame& b, double s) {
  Frame f = a;
  f.root_pos = (1.0 - s) * a.root_pos + s * b.root_pos;
  double dy = wrap_angle(b.root_rpy.z() - a.root_rpy.z());
  f.root_rpy = Vec3(0.0, 0.0, wrap_angle(a.root_rpy.z() + s * dy));
  for (std::size_t i = 0; i < f.dofs.size(); ++i) f.dofs[i] = (1.0 - s) * a.dofs[i] + s * b.dofs[i];
  return f;
}

}  // namespace

const char* to_string(MotionFamily family) {
  switch (family) {
    case MotionFamily::stand: return "stand";
    case MotionFamily::squat: return "squat";
    case MotionFamily::wave: return "wave";
    case MotionFamily::walk_in_place: return "walk_in_place";
    case MotionFamily::turn: return "turn";
    case MotionFamily::compose: return "compose";
  }
  return "stand";
}

MotionFamily motion_family_from_string(const std::string& name) {
  for (auto f : {MotionFamily::stand, MotionFamily::squat, MotionFamily::wave, MotionFamily::walk_in_place,
                 MotionFamily::turn, MotionFamily::compose}) {
    if (name == to_string(f)) return f;
  }
  throw ValidationError("unknown motion family '" + name + "'");
}

std::string describe(MotionFamily family, const SynthParams& params) {
  return "a robot " + predicate(family, params);
}

MotionClip synth_motion(MotionFamily family, const SynthParams& params, std::uint64_t seed, double duration_s,
                        const RobotModel& model, double fps) {
  if (!(duration_s >= 0.5)) throw ValidationError("synth_motion: duration must be >= 0.5 s");
  if (!(fps > 0.0)) throw ValidationError("synth_motion: fps must be positive");
  validate_params(family, params);
  const Frame base = base_pose(model, seed);
  Rng rng(seed, 0xfa5e);
  const double phase = rng.uniform(0.0, 2.0 * kPi);

  MotionClip clip;
  clip.fps = fps;
  clip.text = describe(family, params);
  clip.source_tag = SourceTag::synthetic;
  const auto total = static_cast<std::size_t>(std::lround(duration_s * fps));

  if (family != MotionFamily::compose) {
    const double T = static_cast<double>(total - 1) / fps;
    for (std::size_t i = 0; i < total; ++i) {
      clip.frames.push_back(atomic_frame(family, params, base, model, Segment{}, static_cast<double>(i) / fps, T, phase));
    }
    return clip;
  }

  const std::size_t parts = params.parts.size();
  const auto blend = static_cast<std::size_t>(std::lround(kBlendSeconds * fps));
  if (total < blend * (parts - 1) + parts * static_cast<std::size_t>(std::ceil(0.5 * fps))) {
    throw ValidationError("compose: duration too short for the requested parts");
  }
  const std::size_t budget = total - blend * (parts - 1);
  double weight_sum = 0.0;
  for (const ComposePart& p : params.parts) weight_sum += p.weight;
  Segment seg;
  std::size_t used = 0;
  for (std::size_t k = 0; k < parts; ++k) {
    const ComposePart& part = params.parts[k];
    const std::size_t n = k + 1 == parts ? budget - used
                                         : static_cast<std::size_t>(std::lround(budget * part.weight / weight_sum));
    used += n;
    const double T = static_cast<double>(n - 1) / fps;
    std::vector<Frame> frames;
    for (std::size_t i = 0; i < n; ++i) {
      frames.push_back(atomic_frame(part.family, part.params, base, model, seg, static_cast<double>(i) / fps, T, phase));
    }
    if (k > 0) {
      const Frame from = clip.frames.back();
      for (std::size_t i = 1; i <= blend; ++i) {
        const double s = smoothstep(static_cast<double>(i) / static_cast<double>(blend + 1));
        clip.frames.push_back(lerp_frames(from, frames.front(), s));
      }
    }
    clip.frames.insert(clip.frames.end(), frames.begin(), frames.end());
    seg.start_yaw = end_yaw(part.family, part.params, seg.start_yaw);
  }
  return clip;
}

std::vector<MotionClip> synth_corpus(const CorpusOptions& options, const RobotModel& model) {
  auto draw_atomic = [](Rng& rng, bool allow_stand, MotionFamily& family, SynthParams& p) -> double {
    const double u = rng.uniform();
    if (allow_stand && u < 0.1) {
      family = MotionFamily::stand;
      return rng.uniform(1.5, 3.0);
    }
    const int pick = static_cast<int>(rng.below(4));
    switch (pick) {
      case 0:
        family = MotionFamily::squat;
        p.depth = rng.uniform(0.1, 0.35);
        p.reps = rng.range(1, 3);
        return p.reps * rng.uniform(1.6, 2.2);
      case 1: {
        family = MotionFamily::wave;
        const double s = rng.uniform();
        p.side = s < 0.4 ? Side::left : (s < 0.8 ? Side::right : Side::both);
        p.reps = rng.range(2, 4);
        p.amplitude = rng.uniform(0.3, 0.6);
        return 1.2 + p.reps * rng.uniform(0.6, 0.8);
      }
      case 2:
        family = MotionFamily::walk_in_place;
        p.cadence = rng.uniform(1.1, 2.1);
        p.amplitude = rng.uniform(0.3, 0.7);
        return rng.uniform(2.5, 4.0);
      default: {
        family = MotionFamily::turn;
        static constexpr double kAngles[] = {45.0, 90.0, 180.0};
        p.turn_deg = kAngles[rng.below(3)] * (rng.bernoulli(0.5) ? 1.0 : -1.0);
        return rng.uniform(1.5, 2.5) + std::abs(p.turn_deg) / 180.0;
      }
    }
  };

  std::vector<MotionClip> clips;
  clips.reserve(options.clips);
  for (std::size_t i = 0; i < options.clips; ++i) {
    Rng rng(options.seed, i);
    MotionFamily family;
    SynthParams params;
    double duration;
    if (rng.bernoulli(options.compose_probability)) {
      family = MotionFamily::compose;
      const int parts = rng.bernoulli(0.7) ? 2 : 3;
      duration = kBlendSeconds * (parts - 1);
      for (int k = 0; k < parts; ++k) {
        ComposePart part;
        part.weight = draw_atomic(rng, false, part.family, part.params);
        duration += part.weight;
        params.parts.push_back(std::move(part));
      }
    } else {
      duration = draw_atomic(rng, true, family, params);
    }
    const std::uint64_t clip_seed = rng.next_u64();
    MotionClip clip = synth_motion(family, params, clip_seed, duration, model, options.fps);
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%06zu", i);
    clip.id = id;
    clips.push_back(std::move(clip));
  }
  return clips;
}

}  // namespace humo
