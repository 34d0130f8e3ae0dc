#include <doctest.h>

#include <cmath>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"
#include "humo/eval/evaluator.hpp"
#include "humo/eval/fid.hpp"
#include "humo/eval/metrics.hpp"
#include "humo/eval/retrieval.hpp"
#include "humo/kinematics/forward.hpp"
#include "humo/motion/synth.hpp"

using namespace humo;

namespace {

MotionClip random_clip(const RobotModel& model, std::size_t frames, Rng& rng) {
  MotionClip c;
  for (std::size_t f = 0; f < frames; ++f) {
    Frame fr;
    fr.root_pos = Vec3(rng.normal(), rng.normal(), 0.7 + 0.1 * rng.normal());
    fr.root_rpy = Vec3(0.2 * rng.normal(), 0.2 * rng.normal(), rng.uniform(-3.0, 3.0));
    for (std::size_t j = 0; j < model.dof_count(); ++j) fr.dofs.push_back(0.5 * rng.normal());
    c.frames.push_back(fr);
  }
  return c;
}

// Hand-written oracle: per frame, per joint, explicit sqrt of summed squares.
double loop_oracle(const std::vector<std::vector<Vec3>>& a, const std::vector<std::vector<Vec3>>& b) {
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t f = 0; f < a.size(); ++f)
    for (std::size_t j = 0; j < a[f].size(); ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (a[f][j][k] - b[f][j][k]) * (a[f][j][k] - b[f][j][k]);
      total += std::sqrt(s);
      ++n;
    }
  return total / static_cast<double>(n);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index n, Eigen::Index e, Rng& rng, double sd = 1.0) {
  Eigen::MatrixXd m(n, e);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, sd);
  return m;
}

}  // namespace

TEST_CASE("mpjpe and mpkpe against loop oracles") {
  const RobotModel& model = default_robot_model();
  Rng rng(3);
  std::vector<MotionClip> a{random_clip(model, 5, rng), random_clip(model, 3, rng)};
  std::vector<MotionClip> b{random_clip(model, 5, rng), random_clip(model, 3, rng)};
  CHECK(mpjpe(a, a, model) == 0.0);
  CHECK(mpkpe(a, a, model) == 0.0);

  std::vector<std::vector<Vec3>> ja, jb, ka, kb;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t f = 0; f < a[c].size(); ++f) {
      for (auto* pair : {&a, &b}) {
        const Frame& fr = (*pair)[c].frames[f];
        const JointPoses jp = joint_poses(model, fr);
        std::vector<Vec3> js, ks;
        for (const Vec3& p : jp.positions) js.push_back(p - fr.root_pos);
        const PointMatrix kp = keypoint_positions(model, fr);
        for (Eigen::Index k = 0; k < kp.rows(); ++k) ks.push_back(kp.row(k).transpose() - fr.root_pos);
        (pair == &a ? ja : jb).push_back(js);
        (pair == &a ? ka : kb).push_back(ks);
      }
    }
  CHECK(std::abs(mpjpe(a, b, model) - loop_oracle(ja, jb)) < 1e-12);
  CHECK(std::abs(mpkpe(a, b, model) - loop_oracle(ka, kb)) < 1e-12);

  // root translation is removed before comparing
  std::vector<MotionClip> shifted = a;
  for (auto& c : shifted)
    for (auto& f : c.frames) f.root_pos += Vec3(0.3, -0.1, 0.2);
  CHECK(mpjpe(shifted, a, model) < 1e-12);

  std::vector<MotionClip> shorter{a[0], random_clip(model, 2, rng)};
  CHECK_THROWS_AS(mpjpe(shorter, b, model), DimensionError);
  CHECK_THROWS_AS(mpkpe(std::vector<MotionClip>{a[0]}, b, model), DimensionError);
}

TEST_CASE("uniform point offsets") {
  Rng rng(4);
  std::vector<PointMatrix> a, b;
  for (int f = 0; f < 4; ++f) {
    PointMatrix p(29, 3);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.normal();
    a.push_back(p);
    PointMatrix q = p;
    q.col(0).array() += 0.05;
    b.push_back(q);
  }
  CHECK(mean_point_error(a, b) == doctest::Approx(0.05).epsilon(1e-12));
  std::vector<PointMatrix> c;
  for (const auto& p : a) {
    PointMatrix q = p;
    q.rowwise() += Eigen::RowVector3d(0.02 / std::sqrt(3.0), 0.02 / std::sqrt(3.0), 0.02 / std::sqrt(3.0));
    c.push_back(q);
  }
  CHECK(mean_point_error(a, c) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("l1 and normalized mpjpe") {
  Rng rng(5);
  RowMatrix a(6, 137), b(6, 137);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a.data()[i] = rng.normal();
    b.data()[i] = rng.normal();
  }
  CHECK(l1_metric(a, a) == 0.0);
  CHECK(l1_metric(a, (a.array() + 0.1).matrix()) == doctest::Approx(0.1).epsilon(1e-12));
  double oracle = 0.0;
  for (Eigen::Index r = 0; r < 6; ++r)
    for (Eigen::Index c = 0; c < 137; ++c) oracle += std::abs(a(r, c) - b(r, c));
  CHECK(std::abs(l1_metric(a, b) - oracle / (6 * 137)) < 1e-12);
  CHECK_THROWS_AS(l1_metric(a, RowMatrix(5, 137)), DimensionError);

  const FeatureLayout layout(default_robot_model());
  double kp = 0.0;
  for (Eigen::Index r = 0; r < 6; ++r)
    for (std::size_t k = 0; k < 17; ++k) {
      double s = 0.0;
      for (std::size_t d = 0; d < 3; ++d) {
        const auto c = static_cast<Eigen::Index>(layout.keypoint_pos + 3 * k + d);
        s += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
      }
      kp += std::sqrt(s);
    }
  CHECK(std::abs(normalized_mpjpe(a, b, layout, 17) - kp / (6 * 17)) < 1e-12);
}

TEST_CASE("fid oracles") {
  Rng rng(6);
  const Eigen::MatrixXd x = gaussian_matrix(200, 4, rng);
  CHECK(std::abs(fid(x, x)) < 1e-8);

  Eigen::VectorXd shift = Eigen::VectorXd::Zero(4);
  shift << 0.5, 0.5, 0.5, 0.5;  // unit norm
  const Eigen::MatrixXd y = x.rowwise() + shift.transpose();
  CHECK(std::abs(fid(x, y) - 1.0) < 1e-6);

  const Eigen::MatrixXd z = gaussian_matrix(150, 4, rng, 1.5);
  CHECK(std::abs(fid(x, z) - fid(z, x)) < 1e-8);
  CHECK(fid(x, z) >= 0.0);

  // sigma_a = 1, sigma_b = 2, E = 2: 2 * (1 + 4 - 2 * 2) = 2
  const Eigen::MatrixXd a = gaussian_matrix(100000, 2, rng, 1.0);
  const Eigen::MatrixXd b = gaussian_matrix(100000, 2, rng, 2.0);
  CHECK(std::abs(fid(a, b) - 2.0) < 0.05);

  Eigen::MatrixXd bad = x;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(fid(bad, x), ValidationError);
  CHECK_THROWS_AS(fid(x, gaussian_matrix(10, 3, rng)), DimensionError);
  Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(frechet_distance(Eigen::VectorXd::Zero(2), neg, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)),
                  ValidationError);
  // few samples get the ridge and stay finite
  CHECK(std::isfinite(fid(gaussian_matrix(3, 4, rng), gaussian_matrix(3, 4, rng))));
}

TEST_CASE("retrieval recall") {
  Rng rng(7);
  const Eigen::MatrixXd e = gaussian_matrix(20, 8, rng);
  CHECK(retrieval_rk(e, e, 1) == 1.0);

  const Eigen::MatrixXd m = gaussian_matrix(100, 16, rng);
  const Eigen::MatrixXd t = gaussian_matrix(100, 16, rng);
  CHECK(retrieval_rk(m, t, 1) < 0.05);
  double prev = 0.0;
  for (std::size_t k = 1; k <= 10; ++k) {
    const double r = retrieval_rk(m, t, k);
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(retrieval_rk(m, t, 100) == 1.0);
  CHECK_THROWS_AS(retrieval_rk(m, t, 0), ValidationError);
  CHECK_THROWS_AS(retrieval_rk(m, t, 101), ValidationError);

  // identical motions tie; the lower index wins
  Eigen::MatrixXd same = Eigen::MatrixXd::Ones(3, 2);
  const auto ranks = retrieval_ranks(same, same);
  CHECK(ranks == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("metric report round-trip and validation") {
  MetricReport r;
  r.mpjpe = 0.01;
  r.usage = 0.5;
  r.fid = 1.5;
  r.r_at = {{1, 0.5}, {2, 0.75}, {3, 0.8}};
  const MetricReport back = metric_report_from_json(metric_report_to_json(r));
  CHECK(back.mpjpe == r.mpjpe);
  CHECK(back.r_at == r.r_at);
  CHECK(!back.l1.has_value());
  r.usage = 1.5;
  CHECK_THROWS_AS(r.validate(), ValidationError);
}

TEST_CASE("evaluator memorizes four pairs") {
  Rng rng(8);
  std::vector<EvalPair> pairs;
  for (int i = 0; i < 4; ++i) {
    RowMatrix m(24, 10);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.normal();
    pairs.push_back({m, {i, 4 + i % 2}});
  }
  EvaluatorConfig cfg;
  cfg.input_dim = 10;
  cfg.vocab_size = 6;
  cfg.width = 16;
  cfg.word_dim = 16;
  cfg.embed_dim = 16;
  cfg.batch_size = 4;
  cfg.window = 24;
  cfg.steps = 150;
  cfg.lr = 3e-3;
  cfg.seed = 2;
  Evaluator a(cfg), b(cfg);
  const auto ca = train_evaluator(a, pairs);
  const auto cb = train_evaluator(b, pairs);
  CHECK(ca == cb);
  CHECK(ca.back() < ca.front());

  std::vector<RowMatrix> motions;
  std::vector<std::vector<int>> texts;
  for (const auto& p : pairs) {
    motions.push_back(p.motion);
    texts.push_back(p.text);
  }
  const Eigen::MatrixXd me = a.motion_embeddings(motions);
  const Eigen::MatrixXd te = a.text_embeddings(texts);
  CHECK(retrieval_rk(me, te, 1) == 1.0);
  for (Eigen::Index i = 0; i < me.rows(); ++i) CHECK(me.row(i).norm() == doctest::Approx(1.0));

  EvaluatorConfig tiny = cfg;
  tiny.batch_size = 1;
  CHECK_THROWS_AS(Evaluator{tiny}, ValidationError);
  CHECK_THROWS_AS(train_evaluator(a, {pairs[0]}), ValidationError);
}
