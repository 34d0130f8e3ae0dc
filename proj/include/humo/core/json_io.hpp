#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace humo {

using Json = nlohmann::ordered_json;

std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate + write, throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value);

std::vector<double> json_to_vector(const Json& j, const char* what);
Json vector_to_json(const std::vector<double>& v);

}  // namespace humo
