#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "humo/core/error.hpp"
#include "humo/core/json_io.hpp"
#include "humo/core/rng.hpp"
#include "humo/kinematics/forward.hpp"
#include "humo/kinematics/representation.hpp"
#include "humo/motion/filter.hpp"
#include "humo/motion/motion_io.hpp"
#include "humo/motion/norm.hpp"
#include "humo/motion/split.hpp"
#include "humo/motion/synth.hpp"

using namespace humo;

namespace {

std::size_t joint_index(const RobotModel& m, const std::string& name) {
  for (std::size_t i = 0; i < m.dof_count(); ++i)
    if (m.joints[i].name == name) return i;
  FAIL("no joint " << name);
  return 0;
}

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "humo_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Strict interior local maxima of a sampled signal.
int count_peaks(const std::vector<double>& x) {
  int n = 0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i)
    if (x[i] > x[i - 1] && x[i] >= x[i + 1]) ++n;
  return n;
}

}  // namespace

TEST_CASE("stand clip is static") {
  const MotionClip c = synth_motion(MotionFamily::stand, {}, 0, 2.0);
  CHECK(c.size() == 60);
  CHECK(c.fps == 30.0);
  double worst = 0.0;
  for (std::size_t t = 1; t < c.size(); ++t)
    for (std::size_t j = 0; j < c.dof_count(); ++j)
      worst = std::max(worst, std::abs(c.frames[t].dofs[j] - c.frames[t - 1].dofs[j]) * c.fps);
  CHECK(worst < 0.01);
}

TEST_CASE("synthesis is deterministic") {
  for (auto fam : {MotionFamily::squat, MotionFamily::wave, MotionFamily::walk_in_place, MotionFamily::turn,
                   MotionFamily::compose}) {
    SynthParams p;
    if (fam == MotionFamily::compose) {
      p.parts = {{MotionFamily::squat, {}, 1.0}, {MotionFamily::wave, {}, 1.0}};
    }
    CHECK(synth_motion(fam, p, 4, 3.0) == synth_motion(fam, p, 4, 3.0));
  }
  CHECK_THROWS_AS(motion_family_from_string("cartwheel"), ValidationError);
  CHECK_THROWS_AS(synth_motion(MotionFamily::stand, {}, 0, 0.4), ValidationError);
}

TEST_CASE("squat has two flexion cycles and drops the pelvis by the depth") {
  const RobotModel& m = default_robot_model();
  SynthParams p;
  p.depth = 0.3;
  p.reps = 2;
  const MotionClip c = synth_motion(MotionFamily::squat, p, 1, 4.0);
  const std::size_t knee = joint_index(m, "left_knee");
  std::vector<double> flex, neg_height;
  for (const auto& f : c.frames) {
    flex.push_back(f.dofs[knee]);
    neg_height.push_back(-f.root_pos.z());
  }
  CHECK(count_peaks(flex) == 2);
  CHECK(count_peaks(neg_height) == 2);
  double lowest = 1e9;
  for (const auto& f : c.frames) lowest = std::min(lowest, f.root_pos.z());
  CHECK(lowest == doctest::Approx(c.frames.front().root_pos.z() - 0.3).epsilon(0.01));
  CHECK(c.text == "a robot squats down twice");
  // Feet stay on the ground: the drop is absorbed by the legs.
  for (std::size_t t = 0; t < c.size(); t += 10) {
    const PointMatrix k = keypoint_positions(m, c.frames[t]);
    CHECK(std::abs(k.col(2).minCoeff()) < 1e-9);
  }
}

TEST_CASE("synthetic clips stay within joint limits and pass the filter") {
  const RobotModel& m = default_robot_model();
  CorpusOptions opt;
  opt.clips = 200;
  opt.seed = 3;
  const auto corpus = synth_corpus(opt);
  REQUIRE(corpus.size() == 200);
  std::set<std::string> ids;
  std::size_t rejects = 0;
  for (const auto& c : corpus) {
    ids.insert(c.id);
    CHECK_FALSE(c.text.empty());
    const FilterReport r = feasibility_filter(c, m);
    if (r.verdict == Verdict::reject) {
      ++rejects;
      MESSAGE(c.id << ": " << format_filter_report(r));
    }
  }
  CHECK(ids.size() == 200);
  CHECK(rejects == 0);
}

TEST_CASE("every injected defect is caught by its rule at the injected frame") {
  const RobotModel& m = default_robot_model();
  const MotionClip base = synth_motion(MotionFamily::walk_in_place, {}, 2, 3.0);
  REQUIRE(feasibility_filter(base, m).verdict == Verdict::keep);
  for (auto defect : {Defect::velocity_spike, Defect::limit_breach, Defect::ground_penetration}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const InjectedClip inj = inject_infeasible(base, defect, seed);
      const FilterReport r = feasibility_filter(inj.clip, m);
      CHECK(r.verdict == Verdict::reject);
      const bool hit = std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) {
        return v.rule == expected_rule(defect) && v.frame == inj.frame;
      });
      CHECK(hit);
    }
  }
}

TEST_CASE("limit breach sets one dof to hi + 0.1") {
  const RobotModel& m = default_robot_model();
  const MotionClip base = synth_motion(MotionFamily::stand, {}, 0, 2.0);
  const InjectedClip inj = inject_infeasible(base, Defect::limit_breach, 9);
  REQUIRE(inj.dof.has_value());
  CHECK(inj.clip.frames[inj.frame].dofs[*inj.dof] == doctest::Approx(m.joints[*inj.dof].hi + 0.1));
  const FilterReport r = feasibility_filter(inj.clip, m);
  std::size_t limit_hits = 0;
  for (const auto& v : r.violations)
    if (v.rule == rule::joint_limit) ++limit_hits;
  CHECK(limit_hits == 1);
}

TEST_CASE("ten injected defects in a hundred clips give ten rejects") {
  const RobotModel& m = default_robot_model();
  CorpusOptions opt;
  opt.clips = 100;
  opt.seed = 12;
  auto corpus = synth_corpus(opt);
  const Defect kinds[] = {Defect::velocity_spike, Defect::limit_breach, Defect::ground_penetration};
  for (std::size_t i = 0; i < 10; ++i) corpus[i * 10] = inject_infeasible(corpus[i * 10], kinds[i % 3], i).clip;
  std::size_t rejects = 0;
  for (const auto& c : corpus) rejects += feasibility_filter(c, m).verdict == Verdict::reject;
  CHECK(rejects == 10);
}

TEST_CASE("split sizes and determinism") {
  const SplitIndices s = split_indices(100, {}, 7);
  CHECK(s.train.size() == 80);
  CHECK(s.test.size() == 15);
  CHECK(s.val.size() == 5);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  all.insert(s.val.begin(), s.val.end());
  CHECK(all.size() == 100);

  const SplitIndices one = split_indices(1, {}, 7);
  CHECK(one.train.size() == 1);
  CHECK(one.test.empty());
  CHECK(one.val.empty());

  const SplitIndices again = split_indices(100, {}, 7);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  CHECK(split_indices(100, {}, 8).train != s.train);

  CHECK_THROWS_AS(split_indices(0, {}, 1), ValidationError);
  CHECK_THROWS_AS(split_indices(10, {0.5, 0.5, 0.5}, 1), ValidationError);

  std::vector<int> items(20);
  for (int i = 0; i < 20; ++i) items[static_cast<std::size_t>(i)] = i;
  const auto parts = split_dataset(items, {}, 1);
  CHECK(parts[0].size() + parts[1].size() + parts[2].size() == 20);
}

TEST_CASE("norm stats") {
  RowMatrix same(3, 4);
  same.setConstant(2.5);
  const NormStats s0 = compute_norm_stats(same);
  for (double v : s0.std) CHECK(v == kStdFloor);

  RowMatrix two(2, 3);
  two << 0, 0, 0, 2, 2, 2;
  const NormStats s1 = compute_norm_stats(two);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s1.mean[i] == doctest::Approx(1.0));
    CHECK(s1.std[i] == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(compute_norm_stats(RowMatrix(1, 3)), ValidationError);

  // Two-pass reference.
  Rng rng(4);
  RowMatrix x(57, 6);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = rng.uniform(-3, 5) * (c + 1) + 10.0 * c;
  const NormStats s = compute_norm_stats(x);
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mu = x.col(c).mean();
    const double var = (x.col(c).array() - mu).square().mean();
    CHECK(std::abs(s.mean[static_cast<std::size_t>(c)] - mu) < 1e-12);
    CHECK(std::abs(s.std[static_cast<std::size_t>(c)] - std::sqrt(var)) < 1e-12);
  }
  const RowMatrix z = normalize(x, s);
  const NormStats sz = compute_norm_stats(z);
  for (std::size_t c = 0; c < 6; ++c) {
    CHECK(std::abs(sz.mean[c]) < 1e-9);
    CHECK(std::abs(sz.std[c] - 1.0) < 1e-9);
  }
  const RowMatrix back = denormalize(z, s);
  CHECK(((back - x).array().abs() / x.array().abs().max(1.0)).maxCoeff() < 1e-9);
  RowMatrix at_mean(1, 6);
  for (std::size_t c = 0; c < 6; ++c) at_mean(0, static_cast<Eigen::Index>(c)) = s.mean[c];
  CHECK(normalize(at_mean, s).isZero(0.0));
  CHECK_THROWS_AS(normalize(RowMatrix(2, 5), s), DimensionError);
  const NormStats reread = norm_stats_from_json(norm_stats_to_json(s));
  CHECK(reread.mean == s.mean);
  CHECK(reread.std == s.std);
}

TEST_CASE("motion file round trip") {
  const RobotModel& m = default_robot_model();
  std::vector<MotionClip> clips{synth_motion(MotionFamily::wave, {}, 1, 2.0), synth_motion(MotionFamily::turn, {}, 2, 1.0)};
  clips[1].text = "text with \"quotes\" and\nnewline";
  const auto path = temp_path("roundtrip.motion");
  write_motion_file(path, clips, m.keypoint_count(), model_hash(m));
  const MotionFile back = read_motion_file(path);
  REQUIRE(back.clips.size() == 2);
  CHECK(back.clips[0] == clips[0]);
  CHECK(back.clips[1] == clips[1]);
  CHECK(back.model_hash == model_hash(m));
  CHECK(serialize_motion(back.clips, m.keypoint_count(), back.model_hash) == read_text_file(path));
}

TEST_CASE("motion file errors") {
  const RobotModel& m = default_robot_model();
  const std::vector<MotionClip> clips{synth_motion(MotionFamily::stand, {}, 0, 1.0)};
  std::string text = serialize_motion(clips, m.keypoint_count(), model_hash(m));

  std::string bumped = text;
  bumped.replace(bumped.find("\"format_version\":1"), 18, "\"format_version\":99");
  CHECK_THROWS_AS(parse_motion(bumped), VersionError);

  std::string truncated = text.substr(0, text.size() - 40);
  try {
    parse_motion(truncated);
    FAIL("expected a corrupt record error");
  } catch (const CorruptRecordError& e) {
    CHECK(e.record() == 31);  // header line + 30 frames; the last one is cut
  }
  CHECK_THROWS_AS(read_motion_file(temp_path("does_not_exist.motion")), IoError);
}

TEST_CASE("filter report is one line per violation") {
  const RobotModel& m = default_robot_model();
  const MotionClip base = synth_motion(MotionFamily::stand, {}, 0, 2.0);
  const InjectedClip inj = inject_infeasible(base, Defect::ground_penetration, 1);
  const FilterReport r = feasibility_filter(inj.clip, m);
  const std::string text = format_filter_report(r);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == r.violations.size() + 1);
  CHECK(Json::parse(text.substr(0, text.find('\n'))).at("verdict") == "reject");
}
