#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "humo/kinematics/clip.hpp"
#include "humo/kinematics/retarget.hpp"

namespace humo {

constexpr int kMotionFormatVersion = 1;

struct MotionFile {
  std::vector<MotionClip> clips;
  std::string model_hash;
};

/// Line-delimited: a JSON header object per clip, then one JSON array per frame
/// [root_pos(3), root_rpy(3), dofs(d)]; clips separated by a blank line.
std::string serialize_motion(std::span<const MotionClip> clips, std::size_t keypoint_count,
                             const std::string& model_hash);
MotionFile parse_motion(const std::string& text);

void write_motion_file(const std::filesystem::path& path, std::span<const MotionClip> clips,
                       std::size_t keypoint_count, const std::string& model_hash);
/// Throws IoError, VersionError, or CorruptRecordError naming the 1-based line.
MotionFile read_motion_file(const std::filesystem::path& path);

/// Source keypoint trajectories for retargeting: header with the T-pose, then one
/// flattened 3n array per frame.
void write_keypoint_file(const std::filesystem::path& path, std::span<const KeypointTrajectory> trajectories);
std::vector<KeypointTrajectory> read_keypoint_file(const std::filesystem::path& path);

}  // namespace humo
