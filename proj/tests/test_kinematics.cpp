#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"
#include "humo/kinematics/forward.hpp"
#include "humo/kinematics/postprocess.hpp"
#include "humo/kinematics/representation.hpp"
#include "humo/kinematics/retarget.hpp"
#include "humo/kinematics/robot_model.hpp"
#include "humo/kinematics/rotation.hpp"

using namespace humo;

namespace {

constexpr double kPi = std::numbers::pi;

// Planar chain in the x-y plane: two unit links turning about z, a third fixed stub.
const char* kChain = R"({
  "format_version": 1,
  "name": "chain",
  "joints": [
    {"name": "shoulder", "parent": null, "offset": [0, 0, 0], "axis": [0, 0, 1], "limits": [-3, 3]},
    {"name": "elbow", "parent": 0, "offset": [1, 0, 0], "axis": [0, 0, 1], "limits": [-3, 3]},
    {"name": "wrist", "parent": 1, "offset": [1, 0, 0], "axis": [0, 0, 1], "limits": [-1, 1]}
  ],
  "keypoint_bindings": [
    {"name": "base", "joint": null, "parent": null, "offset": [0, 0, 0]},
    {"name": "tip", "joint": 1, "parent": 0, "offset": [1, 0, 0]}
  ],
  "active_dof_mask": [true, true, false],
  "tpose_dofs": [0, 0, 0]
})";

Vec3 random_rpy(Rng& rng, double max_pitch) {
  return Vec3(rng.uniform(-kPi, kPi), rng.uniform(-max_pitch, max_pitch), rng.uniform(-kPi, kPi));
}

Frame random_in_limits(const RobotModel& m, Rng& rng, double shrink = 0.3) {
  Frame f = tpose_frame(m, Vec3(0, 0, 0.7));
  for (std::size_t j = 0; j < m.dof_count(); ++j) {
    if (!m.active_dof_mask[j]) continue;
    const double mid = 0.5 * (m.joints[j].lo + m.joints[j].hi);
    const double half = 0.5 * (m.joints[j].hi - m.joints[j].lo) * shrink;
    f.dofs[j] = rng.uniform(mid - half, mid + half);
  }
  return f;
}

MotionClip constant_clip(const RobotModel& m, std::size_t n, double height) {
  MotionClip c;
  c.id = "c";
  for (std::size_t i = 0; i < n; ++i) c.frames.push_back(tpose_frame(m, Vec3(0, 0, height)));
  return c;
}

}  // namespace

TEST_CASE("default model has 29 dofs, 17 keypoints, 23 active") {
  const RobotModel& m = default_robot_model();
  CHECK(m.dof_count() == 29);
  CHECK(m.keypoint_count() == 17);
  CHECK(m.active_dof_count() == 23);
  for (const auto& j : m.joints) {
    CHECK(j.lo < j.hi);
    CHECK(std::abs(j.axis.norm() - 1.0) < 1e-9);
  }
  // The bundled document and the in-memory model agree.
  CHECK(model_hash(load_robot_model(default_robot_model_document())) == model_hash(m));
}

TEST_CASE("minimal chain loads") {
  RobotModel m = load_robot_model(kChain);
  CHECK(m.dof_count() == 3);
  CHECK(m.keypoint_count() == 2);
}

TEST_CASE("model validation rejects bad documents") {
  std::string forward_parent = kChain;
  forward_parent.replace(forward_parent.find("\"parent\": 0"), 11, "\"parent\": 2");
  CHECK_THROWS_AS(load_robot_model(forward_parent), ValidationError);

  std::string bad_limits = kChain;
  bad_limits.replace(bad_limits.find("[-1, 1]"), 7, "[1, -1]");
  CHECK_THROWS_AS(load_robot_model(bad_limits), ValidationError);

  std::string bad_binding = kChain;
  bad_binding.replace(bad_binding.find("\"joint\": 1"), 10, "\"joint\": 7");
  CHECK_THROWS_AS(load_robot_model(bad_binding), ValidationError);

  CHECK_THROWS_AS(load_robot_model("{ not json"), ParseError);

  std::string version = kChain;
  version.replace(version.find("\"format_version\": 1"), 19, "\"format_version\": 9");
  CHECK_THROWS_AS(load_robot_model(version), Error);
}

TEST_CASE("rpy_to_matrix basics") {
  CHECK((rpy_to_matrix(Vec3::Zero()) - Mat3::Identity()).norm() < 1e-15);
  const Vec3 x = rpy_to_matrix(Vec3(0, 0, kPi / 2)) * Vec3::UnitX();
  CHECK((x - Vec3::UnitY()).norm() < 1e-12);

  // Independent composition from elementary rotations.
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Vec3 v = random_rpy(rng, 1.5);
    Mat3 rx, ry, rz;
    rx << 1, 0, 0, 0, std::cos(v[0]), -std::sin(v[0]), 0, std::sin(v[0]), std::cos(v[0]);
    ry << std::cos(v[1]), 0, std::sin(v[1]), 0, 1, 0, -std::sin(v[1]), 0, std::cos(v[1]);
    rz << std::cos(v[2]), -std::sin(v[2]), 0, std::sin(v[2]), std::cos(v[2]), 0, 0, 0, 1;
    const Mat3 R = rpy_to_matrix(v);
    CHECK((R - rz * ry * rx).norm() < 1e-12);
    CHECK((R.transpose() * R - Mat3::Identity()).norm() < 1e-9);
    CHECK(std::abs(R.determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("matrix_to_rpy inverts rpy_to_matrix away from gimbal lock") {
  CHECK(matrix_to_rpy(Mat3::Identity()).norm() == 0.0);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = random_rpy(rng, kPi / 2 - 1e-3);
    const Vec3 back = matrix_to_rpy(rpy_to_matrix(v));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(wrap_angle(back[k] - v[k])) < 1e-8);
  }
}

TEST_CASE("matrix_to_rpy at gimbal lock sets roll to zero") {
  for (double pitch : {kPi / 2, -kPi / 2}) {
    const Mat3 R = rpy_to_matrix(Vec3(0.4, pitch, 0.9));
    const Vec3 v = matrix_to_rpy(R);
    CHECK(v[0] == 0.0);
    CHECK(std::abs(std::abs(v[1]) - kPi / 2) < 1e-7);
    CHECK((rpy_to_matrix(v) - R).norm() < 1e-6);
  }
}

TEST_CASE("matrix_to_rpy rejects non-rotations") {
  Mat3 R = Mat3::Identity();
  R(0, 0) = 1.1;
  CHECK_THROWS_AS(matrix_to_rpy(R), ValidationError);
  CHECK_THROWS_AS(matrix_to_rpy(-Mat3::Identity()), ValidationError);
}

TEST_CASE("FK of a planar 2-link chain matches hand trigonometry") {
  const RobotModel m = load_robot_model(kChain);
  Frame f = tpose_frame(m);
  f.dofs = {0.0, kPi / 2, 0.0};
  PointMatrix p = keypoint_positions(m, f);
  CHECK(std::abs(p(1, 0) - 1.0) < 1e-12);
  CHECK(std::abs(p(1, 1) - 1.0) < 1e-12);

  const double a = 0.3, b = 1.1;
  f.dofs = {a, b, 0.5};
  p = keypoint_positions(m, f);
  CHECK(std::abs(p(1, 0) - (std::cos(a) + std::cos(a + b))) < 1e-12);
  CHECK(std::abs(p(1, 1) - (std::sin(a) + std::sin(a + b))) < 1e-12);
  const KeypointFrame k = forward_kinematics(m, f);
  CHECK(std::abs(k.orientations_rpy(1, 2) - (a + b)) < 1e-12);
}

TEST_CASE("FK rigid equivariance") {
  const RobotModel& m = default_robot_model();
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    Frame f = random_in_limits(m, rng);
    f.root_rpy = Vec3::Zero();
    f.root_pos = Vec3::Zero();
    const KeypointFrame base = forward_kinematics(m, f);
    const Vec3 t(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    Frame moved = f;
    moved.root_pos = t;
    const PointMatrix shifted = keypoint_positions(m, moved);
    for (Eigen::Index k = 0; k < shifted.rows(); ++k)
      CHECK((shifted.row(k) - base.positions.row(k) - t.transpose()).norm() < 1e-12);

    const Vec3 rpy = random_rpy(rng, 1.2);
    Frame rotated = f;
    rotated.root_rpy = rpy;
    const Mat3 R = rpy_to_matrix(rpy);
    const KeypointFrame rk = forward_kinematics(m, rotated);
    for (Eigen::Index k = 0; k < rk.positions.rows(); ++k) {
      const Vec3 expect = R * base.positions.row(k).transpose();
      CHECK((rk.positions.row(k).transpose() - expect).norm() < 1e-9);
      const Mat3 expect_rot = R * rpy_to_matrix(base.orientations_rpy.row(k).transpose());
      CHECK((rpy_to_matrix(rk.orientations_rpy.row(k).transpose()) - expect_rot).norm() < 1e-9);
    }
  }
}

TEST_CASE("default T-pose is mirror symmetric") {
  const RobotModel& m = default_robot_model();
  const PointMatrix p = keypoint_positions(m, tpose_frame(m));
  for (std::size_t k = 3; k + 1 < m.keypoint_count(); k += 2) {
    CHECK(m.keypoint_bindings[k].name.rfind("left_", 0) == 0);
    CHECK(m.keypoint_bindings[k + 1].name.rfind("right_", 0) == 0);
    CHECK(std::abs(p(k, 0) - p(k + 1, 0)) < 1e-9);
    CHECK(std::abs(p(k, 1) + p(k + 1, 1)) < 1e-9);
    CHECK(std::abs(p(k, 2) - p(k + 1, 2)) < 1e-9);
    CHECK(std::abs(p(k, 1)) > 1e-3);
  }
}

TEST_CASE("representation dimension and round trip") {
  CHECK(feature_dim(default_robot_model()) == 137);
  CHECK(feature_dim(1, 1) == 13);

  const RobotModel& m = default_robot_model();
  Rng rng(8);
  const Frame f = random_in_limits(m, rng);
  const KeypointFrame k = forward_kinematics(m, f);
  const auto row = assemble_representation(f, k);
  REQUIRE(row.size() == 137);
  const auto [f2, k2] = disassemble_representation(row, m);
  CHECK(f2 == f);
  CHECK(k2 == k);

  std::vector<double> short_row(136, 0.0);
  CHECK_THROWS_AS(disassemble_representation(short_row, m), DimensionError);

  const auto [fz, kz] = disassemble_representation(std::vector<double>(137, 0.0), m);
  CHECK(fz.root_pos.isZero());
  CHECK(kz.positions.isZero());
}

TEST_CASE("T-pose scale calibration") {
  const RobotModel& m = default_robot_model();
  const PointMatrix own = keypoint_positions(m, tpose_frame(m, Vec3(0, 0, 0.7)));
  for (const auto& s : tpose_scale_calibration(m, own)) CHECK(s.scale == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& s : tpose_scale_calibration(m, PointMatrix(own * 2.0))) CHECK(s.scale == doctest::Approx(0.5).epsilon(1e-12));
  PointMatrix degenerate = own;
  degenerate.row(2) = degenerate.row(1);  // head collapsed onto torso
  CHECK_THROWS_AS(tpose_scale_calibration(m, degenerate), ValidationError);
}

TEST_CASE("IK fixed point") {
  const RobotModel& m = default_robot_model();
  Rng rng(21);
  const Frame init = random_in_limits(m, rng);
  const IkResult r = retarget_ik(m, keypoint_positions(m, init), init);
  CHECK(r.converged);
  CHECK(r.residual < 1e-12);
  CHECK(r.frame == init);
}

TEST_CASE("IK recovers reachable targets in at least 95 of 100 trials") {
  const RobotModel& m = default_robot_model();
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed, 77);
    const Frame truth = random_in_limits(m, rng);
    Frame init = truth;
    for (std::size_t j = 0; j < m.dof_count(); ++j)
      if (m.active_dof_mask[j]) init.dofs[j] += rng.uniform(-0.1, 0.1);
    init.root_pos += Vec3(rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02));
    const IkResult r = retarget_ik(m, keypoint_positions(m, truth), init);
    if (r.residual < 1e-4) ++ok;
  }
  CHECK(ok >= 95);
}

TEST_CASE("IK on unreachable targets reports a residual") {
  const RobotModel& m = default_robot_model();
  const Frame init = tpose_frame(m, Vec3(0, 0, 0.7));
  PointMatrix targets = keypoint_positions(m, init);
  targets.col(0).array() += 10.0;
  targets(5, 1) += 10.0;  // one arm pulled sideways as well, so no rigid motion fits
  const IkResult r = retarget_ik(m, targets, init);
  CHECK_FALSE(r.converged);
  CHECK(r.residual > 0.0);
  CHECK(std::isfinite(r.residual));
}

TEST_CASE("height correction") {
  const RobotModel& m = default_robot_model();
  MotionClip c = constant_clip(m, 4, 0.67);
  CHECK(min_keypoint_height(c, m) == doctest::Approx(-0.03).epsilon(1e-9));
  const MotionClip h = height_correct(c, m);
  for (const auto& f : h.frames) CHECK(f.root_pos.z() == doctest::Approx(0.70).epsilon(1e-12));
  CHECK(std::abs(min_keypoint_height(h, m)) < 1e-12);
  CHECK(height_correct(h, m) == h);
  CHECK_THROWS(height_correct(MotionClip{}, m));
}

TEST_CASE("smoothing") {
  const RobotModel& m = default_robot_model();
  MotionClip c = constant_clip(m, 6, 0.7);
  CHECK(smooth(c, 1) == c);
  CHECK(smooth(c, 5) == c);
  CHECK_THROWS_AS(smooth(c, 4), ValidationError);
  CHECK_THROWS_AS(smooth(c, 7), ValidationError);

  // Step 0 -> 1 between frames 2 and 3.
  for (std::size_t i = 0; i < c.size(); ++i) c.frames[i].dofs[3] = i < 3 ? 0.0 : 1.0;
  const MotionClip s = smooth(c, 3);
  CHECK(s.frames[2].dofs[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(s.frames[3].dofs[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s.frames[0].dofs[3] == 0.0);
  CHECK(s.frames[5].dofs[3] == 1.0);

  // Yaw crossing the +-pi seam averages on the unwrapped sequence.
  MotionClip w = constant_clip(m, 3, 0.7);
  w.frames[0].root_rpy.z() = kPi - 0.1;
  w.frames[1].root_rpy.z() = -kPi + 0.1;
  w.frames[2].root_rpy.z() = -kPi + 0.3;
  const MotionClip ws = smooth(w, 3);
  CHECK(ws.frames[1].root_rpy.z() == doctest::Approx(-kPi + 0.1).epsilon(1e-12));
}

TEST_CASE("retarget trajectory of the robot's own motion") {
  const RobotModel& m = default_robot_model();
  KeypointTrajectory src;
  src.tpose = keypoint_positions(m, tpose_frame(m, Vec3(0, 0, 0.7)));
  Frame f = tpose_frame(m, Vec3(0, 0, 0.7));
  for (int i = 0; i < 12; ++i) {
    f.dofs[15] = -0.05 * i;  // left shoulder pitch raises the arm
    f.root_pos.x() = 0.01 * i;
    src.frames.push_back(keypoint_positions(m, f));
  }
  RetargetConfig cfg;
  cfg.smooth_window = 1;
  RetargetReport rep;
  const MotionClip out = retarget_trajectory(m, src, cfg, &rep);
  CHECK(out.size() == 12);
  CHECK(out.source_tag == SourceTag::retargeted);
  CHECK(rep.mean_residual < 1e-3);
  CHECK(std::abs(min_keypoint_height(out, m)) < 1e-9);
}
