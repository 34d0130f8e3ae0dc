#include "humo/core/json_io.hpp"

#include <fstream>
#include <sstream>

#include "humo/core/error.hpp"

namespace humo {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

std::vector<double> json_to_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(std::string(what) + ": expected number");
    out.push_back(v.get<double>());
  }
  return out;
}

Json vector_to_json(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

}  // namespace humo
