#include "humo/eval/metrics.hpp"

#include <cmath>

#include "humo/core/error.hpp"
#include "humo/kinematics/forward.hpp"

namespace humo {

double mean_point_error(std::span<const PointMatrix> pred, std::span<const PointMatrix> ref) {
  if (pred.size() != ref.size()) {
    throw DimensionError("point error: " + std::to_string(pred.size()) + " vs " + std::to_string(ref.size()) + " frames");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < pred.size(); ++f) {
    if (pred[f].rows() != ref[f].rows()) throw DimensionError("point error: point counts differ at frame " + std::to_string(f));
    total += (pred[f] - ref[f]).rowwise().norm().sum();
    count += static_cast<std::size_t>(pred[f].rows());
  }
  if (count == 0) throw DimensionError("point error: no points");
  return total / static_cast<double>(count);
}

std::vector<PointMatrix> root_aligned_joints(const RobotModel& model, const MotionClip& clip) {
  std::vector<PointMatrix> out;
  out.reserve(clip.size());
  for (const Frame& f : clip.frames) {
    const JointPoses poses = joint_poses(model, f);
    PointMatrix p(static_cast<Eigen::Index>(poses.positions.size()), 3);
    for (std::size_t j = 0; j < poses.positions.size(); ++j)
      p.row(static_cast<Eigen::Index>(j)) = (poses.positions[j] - f.root_pos).transpose();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PointMatrix> root_aligned_keypoints(const RobotModel& model, const MotionClip& clip) {
  std::vector<PointMatrix> out;
  out.reserve(clip.size());
  for (const Frame& f : clip.frames) {
    PointMatrix p = keypoint_positions(model, f);
    p.rowwise() -= f.root_pos.transpose();
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

template <class Extract>
double clip_error(std::span<const MotionClip> pred, std::span<const MotionClip> ref, const RobotModel& model,
                  Extract extract) {
  if (pred.size() != ref.size() || pred.empty()) {
    throw DimensionError("metric: " + std::to_string(pred.size()) + " predicted vs " + std::to_string(ref.size()) +
                         " reference clips");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < pred.size(); ++c) {
    if (pred[c].size() != ref[c].size()) {
      throw DimensionError("metric: clip " + std::to_string(c) + " has " + std::to_string(pred[c].size()) +
                           " frames vs " + std::to_string(ref[c].size()));
    }
    const auto a = extract(model, pred[c]);
    const auto b = extract(model, ref[c]);
    const std::size_t n = a.size() * static_cast<std::size_t>(a.front().rows());
    total += mean_point_error(a, b) * static_cast<double>(n);
    count += n;
  }
  return total / static_cast<double>(count);
}

}  // namespace

double mpjpe(std::span<const MotionClip> pred, std::span<const MotionClip> ref, const RobotModel& model) {
  return clip_error(pred, ref, model, root_aligned_joints);
}

double mpkpe(std::span<const MotionClip> pred, std::span<const MotionClip> ref, const RobotModel& model) {
  return clip_error(pred, ref, model, root_aligned_keypoints);
}

double l1_metric(const RowMatrix& pred, const RowMatrix& ref) {
  if (pred.rows() != ref.rows() || pred.cols() != ref.cols() || pred.size() == 0) {
    throw DimensionError("l1: shapes " + std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()) + " and " +
                         std::to_string(ref.rows()) + "x" + std::to_string(ref.cols()));
  }
  return (pred - ref).cwiseAbs().mean();
}

double normalized_mpjpe(const RowMatrix& pred, const RowMatrix& ref, const FeatureLayout& layout,
                        std::size_t keypoint_count) {
  if (pred.rows() != ref.rows() || pred.cols() != ref.cols() || pred.rows() == 0) {
    throw DimensionError("normalized mpjpe: row blocks differ in shape");
  }
  if (static_cast<std::size_t>(pred.cols()) < layout.keypoint_pos + 3 * keypoint_count) {
    throw DimensionError("normalized mpjpe: rows too narrow for the keypoint channels");
  }
  double total = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r)
    for (std::size_t k = 0; k < keypoint_count; ++k) {
      const auto c = static_cast<Eigen::Index>(layout.keypoint_pos + 3 * k);
      total += (pred.row(r).segment<3>(c) - ref.row(r).segment<3>(c)).norm();
    }
  return total / static_cast<double>(static_cast<std::size_t>(pred.rows()) * keypoint_count);
}

void MetricReport::validate() const {
  auto finite = [](const std::optional<double>& v, const char* name, bool fraction) {
    if (!v) return;
    if (!std::isfinite(*v)) throw ValidationError(std::string("metric report: ") + name + " is not finite");
    if (*v < 0.0 || (fraction && *v > 1.0)) throw ValidationError(std::string("metric report: ") + name + " out of range");
  };
  finite(mpjpe, "mpjpe", false);
  finite(mpkpe, "mpkpe", false);
  finite(l1, "l1", false);
  finite(normalized_mpjpe, "normalized_mpjpe", false);
  finite(usage, "usage", true);
  finite(fid, "fid", false);
  for (const auto& [k, v] : r_at) finite(v, "r_at", true);
}

Json metric_report_to_json(const MetricReport& r) {
  Json j = Json::object();
  auto put = [&](const char* name, const std::optional<double>& v) {
    if (v) j[name] = *v;
  };
  put("mpjpe", r.mpjpe);
  put("mpkpe", r.mpkpe);
  put("l1", r.l1);
  put("normalized_mpjpe", r.normalized_mpjpe);
  put("usage", r.usage);
  put("fid", r.fid);
  if (!r.r_at.empty()) {
    Json ra = Json::object();
    for (const auto& [k, v] : r.r_at) ra[std::to_string(k)] = v;
    j["r_at"] = ra;
  }
  return j;
}

MetricReport metric_report_from_json(const Json& j) {
  MetricReport r;
  auto get = [&](const char* name, std::optional<double>& v) {
    if (j.contains(name)) v = j.at(name).get<double>();
  };
  get("mpjpe", r.mpjpe);
  get("mpkpe", r.mpkpe);
  get("l1", r.l1);
  get("normalized_mpjpe", r.normalized_mpjpe);
  get("usage", r.usage);
  get("fid", r.fid);
  if (j.contains("r_at"))
    for (const auto& [k, v] : j.at("r_at").items()) r.r_at[std::stoi(k)] = v.get<double>();
  r.validate();
  return r;
}

}  // namespace humo
