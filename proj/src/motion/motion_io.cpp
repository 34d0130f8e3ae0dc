#include "humo/motion/motion_io.hpp"

#include <sstream>

#include "humo/core/error.hpp"
#include "humo/core/json_io.hpp"

namespace humo {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

Json parse_record(const std::string& line, std::size_t lineno) {
  try {
    return Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorruptRecordError(lineno, e.what());
  }
}

std::vector<double> numbers(const Json& j, std::size_t expected, std::size_t lineno) {
  if (!j.is_array() || j.size() != expected) {
    throw CorruptRecordError(lineno, "expected array of " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    if (!v.is_number()) throw CorruptRecordError(lineno, "non-numeric value");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_version(const Json& header, std::size_t lineno) {
  if (!header.is_object() || !header.contains("format_version")) {
    throw CorruptRecordError(lineno, "expected header object with format_version");
  }
  if (header["format_version"] != kMotionFormatVersion) {
    throw VersionError("unsupported format_version " + header["format_version"].dump() + " at line " +
                       std::to_string(lineno));
  }
}

}  // namespace

std::string serialize_motion(std::span<const MotionClip> clips, std::size_t keypoint_count,
                             const std::string& model_hash) {
  std::ostringstream out;
  for (std::size_t c = 0; c < clips.size(); ++c) {
    const MotionClip& clip = clips[c];
    if (c > 0) out << "\n";
    Json header;
    header["format_version"] = kMotionFormatVersion;
    header["fps"] = clip.fps;
    header["dof_count"] = clip.dof_count();
    header["keypoint_count"] = keypoint_count;
    header["model_hash"] = model_hash;
    header["text"] = clip.text;
    header["id"] = clip.id;
    header["source_tag"] = to_string(clip.source_tag);
    header["frame_count"] = clip.size();
    out << header.dump() << "\n";
    for (const Frame& f : clip.frames) {
      Json row = Json::array();
      for (int i = 0; i < 3; ++i) row.push_back(f.root_pos[i]);
      for (int i = 0; i < 3; ++i) row.push_back(f.root_rpy[i]);
      for (double q : f.dofs) row.push_back(q);
      out << row.dump() << "\n";
    }
  }
  return out.str();
}

MotionFile parse_motion(const std::string& text) {
  MotionFile file;
  const std::vector<std::string> lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].empty()) {
      ++i;
      continue;
    }
    const std::size_t header_line = i + 1;
    const Json header = parse_record(lines[i], header_line);
    check_version(header, header_line);
    MotionClip clip;
    std::size_t dof_count = 0, frame_count = 0;
    try {
      clip.fps = header.at("fps").get<double>();
      dof_count = header.at("dof_count").get<std::size_t>();
      frame_count = header.at("frame_count").get<std::size_t>();
      clip.text = header.at("text").get<std::string>();
      clip.id = header.at("id").get<std::string>();
      clip.source_tag = source_tag_from_string(header.at("source_tag").get<std::string>());
      const std::string hash = header.at("model_hash").get<std::string>();
      if (file.clips.empty()) {
        file.model_hash = hash;
      } else if (hash != file.model_hash) {
        throw CorruptRecordError(header_line, "clips disagree on model_hash");
      }
    } catch (const nlohmann::json::exception& e) {
      throw CorruptRecordError(header_line, e.what());
    } catch (const ParseError& e) {
      throw CorruptRecordError(header_line, e.what());
    }
    ++i;
    for (std::size_t t = 0; t < frame_count; ++t, ++i) {
      if (i >= lines.size() || lines[i].empty()) {
        throw CorruptRecordError(i + 1, "clip '" + clip.id + "' ends after " + std::to_string(t) + " of " +
                                            std::to_string(frame_count) + " frames");
      }
      const std::vector<double> v = numbers(parse_record(lines[i], i + 1), 6 + dof_count, i + 1);
      Frame f;
      f.root_pos = Vec3(v[0], v[1], v[2]);
      f.root_rpy = Vec3(v[3], v[4], v[5]);
      f.dofs.assign(v.begin() + 6, v.end());
      clip.frames.push_back(std::move(f));
    }
    if (i < lines.size() && !lines[i].empty()) {
      throw CorruptRecordError(i + 1, "unexpected record after clip '" + clip.id + "'");
    }
    file.clips.push_back(std::move(clip));
  }
  return file;
}

void write_motion_file(const std::filesystem::path& path, std::span<const MotionClip> clips,
                       std::size_t keypoint_count, const std::string& model_hash) {
  write_text_file(path, serialize_motion(clips, keypoint_count, model_hash));
}

MotionFile read_motion_file(const std::filesystem::path& path) { return parse_motion(read_text_file(path)); }

void write_keypoint_file(const std::filesystem::path& path, std::span<const KeypointTrajectory> trajectories) {
  std::ostringstream out;
  for (std::size_t c = 0; c < trajectories.size(); ++c) {
    const KeypointTrajectory& tr = trajectories[c];
    if (c > 0) out << "\n";
    Json tpose = Json::array();
    for (Eigen::Index k = 0; k < tr.tpose.rows(); ++k) tpose.push_back({tr.tpose(k, 0), tr.tpose(k, 1), tr.tpose(k, 2)});
    Json header = {{"format_version", kMotionFormatVersion}, {"kind", "keypoint_trajectory"},
                   {"fps", tr.fps}, {"keypoint_count", tr.tpose.rows()}, {"id", tr.id}, {"text", tr.text},
                   {"frame_count", tr.frames.size()}, {"tpose", tpose}};
    out << header.dump() << "\n";
    for (const PointMatrix& f : tr.frames) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < f.rows(); ++k)
        for (int i = 0; i < 3; ++i) row.push_back(f(k, i));
      out << row.dump() << "\n";
    }
  }
  write_text_file(path, out.str());
}

std::vector<KeypointTrajectory> read_keypoint_file(const std::filesystem::path& path) {
  const std::vector<std::string> lines = split_lines(read_text_file(path));
  std::vector<KeypointTrajectory> out;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].empty()) {
      ++i;
      continue;
    }
    const std::size_t header_line = i + 1;
    const Json header = parse_record(lines[i], header_line);
    check_version(header, header_line);
    KeypointTrajectory tr;
    std::size_t n = 0, frames = 0;
    try {
      tr.fps = header.at("fps").get<double>();
      tr.id = header.at("id").get<std::string>();
      tr.text = header.at("text").get<std::string>();
      n = header.at("keypoint_count").get<std::size_t>();
      frames = header.at("frame_count").get<std::size_t>();
      const Json& tp = header.at("tpose");
      if (tp.size() != n) throw CorruptRecordError(header_line, "tpose size mismatch");
      tr.tpose.resize(static_cast<Eigen::Index>(n), 3);
      for (std::size_t k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) tr.tpose(static_cast<Eigen::Index>(k), c) = tp[k].at(static_cast<std::size_t>(c)).get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw CorruptRecordError(header_line, e.what());
    }
    ++i;
    for (std::size_t t = 0; t < frames; ++t, ++i) {
      if (i >= lines.size() || lines[i].empty()) throw CorruptRecordError(i + 1, "trajectory '" + tr.id + "' truncated");
      const std::vector<double> v = numbers(parse_record(lines[i], i + 1), 3 * n, i + 1);
      PointMatrix f(static_cast<Eigen::Index>(n), 3);
      for (std::size_t k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) f(static_cast<Eigen::Index>(k), c) = v[3 * k + static_cast<std::size_t>(c)];
      tr.frames.push_back(std::move(f));
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace humo
