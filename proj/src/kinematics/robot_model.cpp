#include "humo/kinematics/robot_model.hpp"

#include <cmath>

#include "humo/core/error.hpp"
#include "humo/core/hash.hpp"

namespace humo {

namespace {

Vec3 parse_vec3(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ParseError(what + ": expected 3-vector");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ParseError(what + ": expected number");
    v[i] = j[i].get<double>();
  }
  return v;
}

std::optional<std::size_t> parse_index(const Json& j, const std::string& what) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number_integer()) throw ParseError(what + ": expected integer or null");
  const auto v = j.get<long long>();
  if (v < 0) throw ValidationError(what + ": negative index");
  return static_cast<std::size_t>(v);
}

Json index_json(const std::optional<std::size_t>& i) {
  return i ? Json(*i) : Json(nullptr);
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::size_t RobotModel::active_dof_count() const {
  std::size_t n = 0;
  for (bool b : active_dof_mask) n += b ? 1 : 0;
  return n;
}

void RobotModel::validate() const {
  if (joints.empty()) throw ValidationError("model has no joints");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const JointSpec& j = joints[i];
    const std::string where = "joint " + std::to_string(i) + " (" + j.name + ")";
    if (j.parent && *j.parent >= i) {
      throw ValidationError(where + ": parent index must precede the joint");
    }
    if (!(j.lo < j.hi)) throw ValidationError(where + ": limits require lo < hi");
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) throw ValidationError(where + ": axis is not unit");
    if (!j.offset.allFinite()) throw ValidationError(where + ": non-finite offset");
  }
  for (std::size_t k = 0; k < keypoint_bindings.size(); ++k) {
    const KeypointBinding& b = keypoint_bindings[k];
    const std::string where = "keypoint " + std::to_string(k) + " (" + b.name + ")";
    if (b.joint && *b.joint >= joints.size()) throw ValidationError(where + ": joint index out of range");
    if (b.parent && *b.parent >= k) throw ValidationError(where + ": parent keypoint must precede it");
  }
  if (active_dof_mask.size() != joints.size()) {
    throw ValidationError("active_dof_mask length does not match dof count");
  }
  if (tpose_dofs.size() != joints.size()) throw ValidationError("tpose_dofs length does not match dof count");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (tpose_dofs[i] < joints[i].lo || tpose_dofs[i] > joints[i].hi) {
      throw ValidationError("tpose_dofs[" + std::to_string(i) + "] outside joint limits");
    }
  }
}

RobotModel load_robot_model(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("robot model: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("robot model: expected object");
  if (!doc.contains("format_version") || doc["format_version"] != kRobotModelFormatVersion) {
    throw VersionError("robot model: unsupported format_version");
  }
  RobotModel model;
  try {
    model.name = doc.value("name", std::string("unnamed"));
    for (const auto& jj : doc.at("joints")) {
      JointSpec j;
      j.name = jj.at("name").get<std::string>();
      j.parent = parse_index(jj.at("parent"), "joint parent");
      j.offset = parse_vec3(jj.at("offset"), "joint offset");
      j.axis = parse_vec3(jj.at("axis"), "joint axis");
      const auto& lim = jj.at("limits");
      if (!lim.is_array() || lim.size() != 2) throw ParseError("joint limits: expected [lo, hi]");
      j.lo = lim[0].get<double>();
      j.hi = lim[1].get<double>();
      model.joints.push_back(std::move(j));
    }
    for (const auto& kj : doc.at("keypoint_bindings")) {
      KeypointBinding b;
      b.name = kj.at("name").get<std::string>();
      b.joint = parse_index(kj.at("joint"), "binding joint");
      b.parent = parse_index(kj.value("parent", Json(nullptr)), "binding parent");
      b.local_offset = parse_vec3(kj.at("offset"), "binding offset");
      model.keypoint_bindings.push_back(std::move(b));
    }
    for (const auto& m : doc.at("active_dof_mask")) model.active_dof_mask.push_back(m.get<bool>());
    model.tpose_dofs = json_to_vector(doc.at("tpose_dofs"), "tpose_dofs");
    if (doc.contains("dof_count") && doc["dof_count"].get<std::size_t>() != model.joints.size()) {
      throw ValidationError("dof_count does not match joint list");
    }
    if (doc.contains("keypoint_count") &&
        doc["keypoint_count"].get<std::size_t>() != model.keypoint_bindings.size()) {
      throw ValidationError("keypoint_count does not match binding count");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("robot model: ") + e.what());
  }
  model.validate();
  return model;
}

RobotModel load_robot_model_file(const std::string& path) {
  return load_robot_model(read_text_file(path));
}

Json robot_model_to_json(const RobotModel& model) {
  Json doc;
  doc["format_version"] = kRobotModelFormatVersion;
  doc["name"] = model.name;
  doc["dof_count"] = model.dof_count();
  doc["keypoint_count"] = model.keypoint_count();
  Json joints = Json::array();
  for (const JointSpec& j : model.joints) {
    joints.push_back({{"name", j.name},
                      {"parent", index_json(j.parent)},
                      {"offset", vec3_json(j.offset)},
                      {"axis", vec3_json(j.axis)},
                      {"limits", Json::array({j.lo, j.hi})}});
  }
  doc["joints"] = std::move(joints);
  Json bindings = Json::array();
  for (const KeypointBinding& b : model.keypoint_bindings) {
    bindings.push_back({{"name", b.name},
                        {"joint", index_json(b.joint)},
                        {"parent", index_json(b.parent)},
                        {"offset", vec3_json(b.local_offset)}});
  }
  doc["keypoint_bindings"] = std::move(bindings);
  Json mask = Json::array();
  for (bool m : model.active_dof_mask) mask.push_back(m);
  doc["active_dof_mask"] = std::move(mask);
  doc["tpose_dofs"] = vector_to_json(model.tpose_dofs);
  return doc;
}

std::string model_hash(const RobotModel& model) {
  return hash_string(robot_model_to_json(model).dump());
}

const RobotModel& default_robot_model() {
  static const RobotModel model = load_robot_model(default_robot_model_document());
  return model;
}

}  // namespace humo
