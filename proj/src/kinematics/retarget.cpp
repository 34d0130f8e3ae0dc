#include "humo/kinematics/retarget.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include "humo/core/error.hpp"
#include "humo/kinematics/forward.hpp"
#include "humo/kinematics/postprocess.hpp"

namespace humo {

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return S;
}

double mean_error(const PointMatrix& a, const PointMatrix& b) {
  return (a - b).rowwise().norm().mean();
}

// For every keypoint, the set of joints whose rotation moves it.
std::vector<std::vector<std::size_t>> keypoint_ancestors(const RobotModel& model) {
  std::vector<std::vector<std::size_t>> out(model.keypoint_count());
  for (std::size_t k = 0; k < model.keypoint_count(); ++k) {
    auto j = model.keypoint_bindings[k].joint;
    while (j) {
      out[k].push_back(*j);
      j = model.joints[*j].parent;
    }
  }
  return out;
}

void clamp_to_limits(const RobotModel& model, Frame& f) {
  for (std::size_t i = 0; i < f.dofs.size(); ++i) {
    f.dofs[i] = std::clamp(f.dofs[i], model.joints[i].lo, model.joints[i].hi);
  }
}

}  // namespace

std::vector<SegmentScale> tpose_scale_calibration(const RobotModel& model,
                                                  const PointMatrix& source_tpose_keypoints) {
  if (static_cast<std::size_t>(source_tpose_keypoints.rows()) != model.keypoint_count()) {
    throw DimensionError("tpose_scale_calibration: source keypoint count differs from model");
  }
  const PointMatrix robot = keypoint_positions(model, tpose_frame(model));
  std::vector<SegmentScale> scales;
  for (std::size_t k = 0; k < model.keypoint_count(); ++k) {
    const auto& parent = model.keypoint_bindings[k].parent;
    if (!parent) continue;
    const auto c = static_cast<Eigen::Index>(k), p = static_cast<Eigen::Index>(*parent);
    const double src_len = (source_tpose_keypoints.row(c) - source_tpose_keypoints.row(p)).norm();
    if (!(src_len >= 1e-6)) {
      throw ValidationError("tpose_scale_calibration: degenerate source segment " +
                            model.keypoint_bindings[*parent].name + " -> " +
                            model.keypoint_bindings[k].name);
    }
    const double robot_len = (robot.row(c) - robot.row(p)).norm();
    scales.push_back({k, *parent, robot_len / src_len});
  }
  return scales;
}

IkResult retarget_ik(const RobotModel& model, const PointMatrix& targets, const Frame& init,
                     const IkConfig& config) {
  const std::size_t n = model.keypoint_count();
  if (static_cast<std::size_t>(targets.rows()) != n) {
    throw DimensionError("retarget_ik: target count differs from keypoint count");
  }
  if (!targets.allFinite()) throw ValidationError("retarget_ik: non-finite targets");
  if (init.dofs.size() != model.dof_count()) throw DimensionError("retarget_ik: init dof count");

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < model.dof_count(); ++i)
    if (model.active_dof_mask[i]) active.push_back(i);
  const auto ancestors = keypoint_ancestors(model);
  const auto rows = static_cast<Eigen::Index>(3 * n);
  const auto cols = static_cast<Eigen::Index>(6 + active.size());

  IkResult best{init, mean_error(keypoint_positions(model, init), targets), 0, false};
  Frame current = init;
  double current_err = best.residual;
  double lambda = config.damping;

  Eigen::MatrixXd J(rows, cols);
  Eigen::VectorXd r(rows);
  int iter = 0;
  while (current_err >= config.tol && iter < config.max_iters) {
    ++iter;
    // Kinematics relative to the root frame, then rotated into the world.
    Frame local = current;
    local.root_pos.setZero();
    local.root_rpy.setZero();
    const JointPoses poses = joint_poses(model, local);
    const PointMatrix p_local = keypoint_positions(model, local);
    const Mat3 R = rpy_to_matrix(current.root_rpy);
    const double cr = std::cos(current.root_rpy.x()), sr = std::sin(current.root_rpy.x());
    const double cp = std::cos(current.root_rpy.y()), sp = std::sin(current.root_rpy.y());
    const double cy = std::cos(current.root_rpy.z()), sy = std::sin(current.root_rpy.z());
    Mat3 Rx, Ry, Rz;
    Rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
    Ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
    Rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
    const Mat3 dRoll = Rz * Ry * skew(Vec3::UnitX()) * Rx;
    const Mat3 dPitch = Rz * skew(Vec3::UnitY()) * Ry * Rx;
    const Mat3 dYaw = skew(Vec3::UnitZ()) * R;

    J.setZero();
    for (std::size_t k = 0; k < n; ++k) {
      const auto row = static_cast<Eigen::Index>(3 * k);
      const Vec3 pk = p_local.row(static_cast<Eigen::Index>(k)).transpose();
      const Vec3 world = current.root_pos + R * pk;
      r.segment<3>(row) = targets.row(static_cast<Eigen::Index>(k)).transpose() - world;
      J.block<3, 3>(row, 0).setIdentity();
      J.block<3, 1>(row, 3) = dRoll * pk;
      J.block<3, 1>(row, 4) = dPitch * pk;
      J.block<3, 1>(row, 5) = dYaw * pk;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const std::size_t j = active[a];
        if (std::find(ancestors[k].begin(), ancestors[k].end(), j) == ancestors[k].end()) continue;
        const Vec3 axis = poses.rotations[j] * model.joints[j].axis;
        J.block<3, 1>(row, static_cast<Eigen::Index>(6 + a)) = R * axis.cross(pk - poses.positions[j]);
      }
    }

    const Eigen::MatrixXd JJt = J * J.transpose();
    const Eigen::MatrixXd A = JJt + lambda * lambda * Eigen::MatrixXd::Identity(rows, rows);
    const Eigen::VectorXd delta = J.transpose() * A.ldlt().solve(r);

    Frame candidate = current;
    candidate.root_pos += delta.segment<3>(0);
    candidate.root_rpy += delta.segment<3>(3);
    for (std::size_t a = 0; a < active.size(); ++a)
      candidate.dofs[active[a]] += delta[static_cast<Eigen::Index>(6 + a)];
    clamp_to_limits(model, candidate);
    const double cand_err = mean_error(keypoint_positions(model, candidate), targets);
    if (cand_err < current_err) {
      current = std::move(candidate);
      current_err = cand_err;
      lambda = std::max(config.damping, lambda * 0.5);
    } else {
      lambda *= 4.0;
      if (lambda > 1e6) break;
    }
  }
  for (int i = 0; i < 3; ++i) current.root_rpy[i] = wrap_angle(current.root_rpy[i]);
  best.frame = std::move(current);
  best.residual = mean_error(keypoint_positions(model, best.frame), targets);
  best.iterations = iter;
  best.converged = best.residual < config.tol;
  return best;
}

PointMatrix apply_segment_scales(const RobotModel& model, const std::vector<SegmentScale>& scales,
                                 const PointMatrix& source) {
  const std::size_t n = model.keypoint_count();
  if (static_cast<std::size_t>(source.rows()) != n) throw DimensionError("apply_segment_scales: keypoint count");
  std::vector<double> per_child(n, 0.0);
  double mean_scale = 0.0;
  for (const SegmentScale& s : scales) {
    per_child[s.child] = s.scale;
    mean_scale += s.scale;
  }
  mean_scale = scales.empty() ? 1.0 : mean_scale / static_cast<double>(scales.size());
  PointMatrix out(source.rows(), 3);
  for (std::size_t k = 0; k < n; ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    const auto& parent = model.keypoint_bindings[k].parent;
    if (!parent) {
      out.row(ki) = source.row(ki) * mean_scale;
    } else {
      const auto pi = static_cast<Eigen::Index>(*parent);
      out.row(ki) = out.row(pi) + per_child[k] * (source.row(ki) - source.row(pi));
    }
  }
  return out;
}

MotionClip retarget_trajectory(const RobotModel& model, const KeypointTrajectory& source,
                               const RetargetConfig& config, RetargetReport* report) {
  if (source.frames.size() < 2) throw ValidationError("retarget: source needs at least 2 frames");
  const auto scales = tpose_scale_calibration(model, source.tpose);
  MotionClip clip;
  clip.fps = source.fps;
  clip.id = source.id;
  clip.text = source.text;
  clip.source_tag = SourceTag::retargeted;

  RetargetReport rep;
  Frame guess = tpose_frame(model);
  for (std::size_t t = 0; t < source.frames.size(); ++t) {
    const PointMatrix targets = apply_segment_scales(model, scales, source.frames[t]);
    if (t == 0) guess.root_pos = targets.row(0).transpose();
    IkResult res = retarget_ik(model, targets, guess, config.ik);
    rep.mean_residual += res.residual;
    rep.max_residual = std::max(rep.max_residual, res.residual);
    if (!res.converged) ++rep.unconverged_frames;
    guess = res.frame;
    clip.frames.push_back(std::move(res.frame));
  }
  rep.mean_residual /= static_cast<double>(source.frames.size());
  clip = height_correct(clip, model);
  int window = config.smooth_window;
  const int len = static_cast<int>(clip.size());
  if (window > len) window = len % 2 == 1 ? len : len - 1;
  if (window > 1) clip = smooth(clip, window);
  if (report) *report = rep;
  return clip;
}

}  // namespace humo
