#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/robot_model.hpp"

namespace humo {

enum class MotionFamily { stand, squat, wave, walk_in_place, turn, compose };

const char* to_string(MotionFamily family);
/// Throws ValidationError on an unknown name.
MotionFamily motion_family_from_string(const std::string& name);

enum class Side { left, right, both };

struct ComposePart;

/// Knobs for the synthetic families; each family reads the fields relevant to it.
struct SynthParams {
  double depth = 0.3;       // squat: vertical drop of the pelvis, meters
  int reps = 2;             // squat repetitions, wave cycles
  Side side = Side::left;   // wave
  double amplitude = 0.4;   // wave swing (rad), walk knee lift (rad)
  double cadence = 1.6;     // walk: steps per second
  double turn_deg = 90.0;   // turn: signed, positive is counter-clockwise (left)
  /// compose: atomic parts in order. The duration left after the 0.5 s blends is shared
  /// in proportion to the part weights.
  std::vector<ComposePart> parts;
};

struct ComposePart {
  MotionFamily family = MotionFamily::stand;
  SynthParams params;
  double weight = 1.0;
};

constexpr double kStandingRootHeight = 0.70;
constexpr double kBlendSeconds = 0.5;

/// Deterministic in (family, params, seed). Needs the joint names of the bundled model.
/// Throws ValidationError for duration_s < 0.5 or an unusable compose list.
MotionClip synth_motion(MotionFamily family, const SynthParams& params, std::uint64_t seed,
                        double duration_s, const RobotModel& model = default_robot_model(),
                        double fps = 30.0);

/// Text description the generator would attach for these parameters ("a robot ...").
std::string describe(MotionFamily family, const SynthParams& params);

struct CorpusOptions {
  std::size_t clips = 200;
  std::uint64_t seed = 0;
  double compose_probability = 0.15;
  double fps = 30.0;
};

/// Mixed-family corpus with randomized parameters and durations; clip ids "synth_000123".
std::vector<MotionClip> synth_corpus(const CorpusOptions& options,
                                     const RobotModel& model = default_robot_model());

}  // namespace humo
