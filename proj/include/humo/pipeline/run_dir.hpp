#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "humo/core/json_io.hpp"

namespace humo {

inline constexpr const char* kToolName = "humo";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kRunRecord = "run.json";

/// Output directory of one subcommand. Records the resolved config, the hash of every
/// input and output, and the tool version in run.json.
class RunDir {
 public:
  RunDir(std::filesystem::path dir, std::string command, Json resolved_config);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  /// Hashes an input; throws MissingArtifactError if absent and HashMismatchError if the
  /// producing run recorded a different hash for it.
  void add_input(const std::string& name, const std::filesystem::path& file);
  void add_output(const std::string& name);
  void add_metric(const std::string& key, Json value);

  /// Writes run.json. Call after every output file is in place.
  void finalize() const;

 private:
  std::filesystem::path dir_;
  std::string command_;
  Json config_;
  Json inputs_ = Json::object();
  std::vector<std::string> outputs_;
  Json metrics_ = Json::object();
};

/// Checks `file` against the run.json next to it, if that record lists it.
void verify_artifact(const std::filesystem::path& file);

}  // namespace humo
