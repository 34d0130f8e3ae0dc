#include "humo/kinematics/robot_model.hpp"

namespace humo {

// 29 revolute DoFs (legs 2x6, waist 3, arms 2x7) and 17 virtual keypoints. The zero
// configuration is the calibration T-pose: legs straight, arms stretched laterally.
// World frame: x forward, y left, z up. Wrist DoFs are marked inactive.
std::string_view default_robot_model_document() {
  static constexpr std::string_view doc = R"json({
  "format_version": 1,
  "name": "humanoid_29dof",
  "dof_count": 29,
  "keypoint_count": 17,
  "joints": [
    {
      "name": "left_hip_pitch",
      "parent": null,
      "offset": [0.0, 0.09, -0.05],
      "axis": [0, 1, 0],
      "limits": [-2.53, 2.88]
    },
    {
      "name": "left_hip_roll",
      "parent": 0,
      "offset": [0, 0, 0],
      "axis": [1, 0, 0],
      "limits": [-0.52, 2.97]
    },
    {
      "name": "left_hip_yaw",
      "parent": 1,
      "offset": [0, 0, -0.08],
      "axis": [0, 0, 1],
      "limits": [-2.76, 2.76]
    },
    {
      "name": "left_knee",
      "parent": 2,
      "offset": [0, 0, -0.22],
      "axis": [0, 1, 0],
      "limits": [-0.087, 2.88]
    },
    {
      "name": "left_ankle_pitch",
      "parent": 3,
      "offset": [0, 0, -0.3],
      "axis": [0, 1, 0],
      "limits": [-0.87, 0.52]
    },
    {
      "name": "left_ankle_roll",
      "parent": 4,
      "offset": [0, 0, 0],
      "axis": [1, 0, 0],
      "limits": [-0.26, 0.26]
    },
    {
      "name": "right_hip_pitch",
      "parent": null,
      "offset": [0.0, -0.09, -0.05],
      "axis": [0, 1, 0],
      "limits": [-2.53, 2.88]
    },
    {
      "name": "right_hip_roll",
      "parent": 6,
      "offset": [0, 0, 0],
      "axis": [1, 0, 0],
      "limits": [-2.97, 0.52]
    },
    {
      "name": "right_hip_yaw",
      "parent": 7,
      "offset": [0, 0, -0.08],
      "axis": [0, 0, 1],
      "limits": [-2.76, 2.76]
    },
    {
      "name": "right_knee",
      "parent": 8,
      "offset": [0, 0, -0.22],
      "axis": [0, 1, 0],
      "limits": [-0.087, 2.88]
    },
    {
      "name": "right_ankle_pitch",
      "parent": 9,
      "offset": [0, 0, -0.3],
      "axis": [0, 1, 0],
      "limits": [-0.87, 0.52]
    },
    {
      "name": "right_ankle_roll",
      "parent": 10,
      "offset": [0, 0, 0],
      "axis": [1, 0, 0],
      "limits": [-0.26, 0.26]
    },
    {
      "name": "waist_yaw",
      "parent": null,
      "offset": [0, 0, 0.05],
      "axis": [0, 0, 1],
      "limits": [-2.62, 2.62]
    },
    {
      "name": "waist_roll",
      "parent": 12,
      "offset": [0, 0, 0],
      "axis": [1, 0, 0],
      "limits": [-0.52, 0.52]
    },
    {
      "name": "waist_pitch",
      "parent": 13,
      "offset": [0, 0, 0],
      "axis": [0, 1, 0],
      "limits": [-0.52, 0.52]
    },
    {
      "name": "left_shoulder_pitch",
      "parent": 14,
      "offset": [0, 0.1, 0.33],
      "axis": [0, 1, 0],
      "limits": [-3.09, 2.67]
    },
    {
      "name": "left_shoulder_roll",
      "parent": 15,
      "offset": [0, 0.05, 0],
      "axis": [1, 0, 0],
      "limits": [-1.7, 1.8]
    },
    {
      "name": "left_shoulder_yaw",
      "parent": 16,
      "offset": [0, 0.08, 0],
      "axis": [0, 1, 0],
      "limits": [-2.62, 2.62]
    },
    {
      "name": "left_elbow",
      "parent": 17,
      "offset": [0, 0.12, 0],
      "axis": [0, 0, -1],
      "limits": [-1.05, 2.09]
    },
    {
      "name": "left_wrist_roll",
      "parent": 18,
      "offset": [0, 0.22, 0],
      "axis": [0, 1, 0],
      "limits": [-1.97, 1.97]
    },
    {
      "name": "left_wrist_pitch",
      "parent": 19,
      "offset": [0, 0, 0],
      "axis": [0, 0, 1],
      "limits": [-1.61, 1.61]
    },
    {
      "name": "left_wrist_yaw",
      "parent": 20,
      "offset": [0, 0, 0],
      "axis": [1, 0, 0],
      "limits": [-1.61, 1.61]
    },
    {
      "name": "right_shoulder_pitch",
      "parent": 14,
      "offset": [0, -0.1, 0.33],
      "axis": [0, 1, 0],
      "limits": [-3.09, 2.67]
    },
    {
      "name": "right_shoulder_roll",
      "parent": 22,
      "offset": [0, -0.05, 0],
      "axis": [1, 0, 0],
      "limits": [-1.8, 1.7]
    },
    {
      "name": "right_shoulder_yaw",
      "parent": 23,
      "offset": [0, -0.08, 0],
      "axis": [0, 1, 0],
      "limits": [-2.62, 2.62]
    },
    {
      "name": "right_elbow",
      "parent": 24,
      "offset": [0, -0.12, 0],
      "axis": [0, 0, 1],
      "limits": [-1.05, 2.09]
    },
    {
      "name": "right_wrist_roll",
      "parent": 25,
      "offset": [0, -0.22, 0],
      "axis": [0, 1, 0],
      "limits": [-1.97, 1.97]
    },
    {
      "name": "right_wrist_pitch",
      "parent": 26,
      "offset": [0, 0, 0],
      "axis": [0, 0, 1],
      "limits": [-1.61, 1.61]
    },
    {
      "name": "right_wrist_yaw",
      "parent": 27,
      "offset": [0, 0, 0],
      "axis": [1, 0, 0],
      "limits": [-1.61, 1.61]
    }
  ],
  "keypoint_bindings": [
    {
      "name": "pelvis",
      "joint": null,
      "parent": null,
      "offset": [0, 0, 0]
    },
    {
      "name": "torso",
      "joint": 14,
      "parent": 0,
      "offset": [0, 0, 0.2]
    },
    {
      "name": "head",
      "joint": 14,
      "parent": 1,
      "offset": [0, 0, 0.55]
    },
    {
      "name": "left_shoulder",
      "joint": 16,
      "parent": 1,
      "offset": [0, 0, 0]
    },
    {
      "name": "right_shoulder",
      "joint": 23,
      "parent": 1,
      "offset": [0, 0, 0]
    },
    {
      "name": "left_elbow",
      "joint": 18,
      "parent": 3,
      "offset": [0, 0, 0]
    },
    {
      "name": "right_elbow",
      "joint": 25,
      "parent": 4,
      "offset": [0, 0, 0]
    },
    {
      "name": "left_wrist",
      "joint": 21,
      "parent": 5,
      "offset": [0, 0, 0]
    },
    {
      "name": "right_wrist",
      "joint": 28,
      "parent": 6,
      "offset": [0, 0, 0]
    },
    {
      "name": "left_hip",
      "joint": 1,
      "parent": 0,
      "offset": [0, 0, 0]
    },
    {
      "name": "right_hip",
      "joint": 7,
      "parent": 0,
      "offset": [0, 0, 0]
    },
    {
      "name": "left_knee",
      "joint": 3,
      "parent": 9,
      "offset": [0, 0, 0]
    },
    {
      "name": "right_knee",
      "joint": 9,
      "parent": 10,
      "offset": [0, 0, 0]
    },
    {
      "name": "left_ankle",
      "joint": 5,
      "parent": 11,
      "offset": [0, 0, 0]
    },
    {
      "name": "right_ankle",
      "joint": 11,
      "parent": 12,
      "offset": [0, 0, 0]
    },
    {
      "name": "left_foot",
      "joint": 5,
      "parent": 13,
      "offset": [0.12, 0, -0.05]
    },
    {
      "name": "right_foot",
      "joint": 11,
      "parent": 14,
      "offset": [0.12, 0, -0.05]
    }
  ],
  "active_dof_mask": [true, true, true, true, true, true, true, true, true, true, true, true, true, true, true, true, true, true, true, false, false, false, true, true, true, true, false, false, false],
  "tpose_dofs": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
})json";
  return doc;
}

}  // namespace humo
