#include "humo/pipeline/run_dir.hpp"

#include "humo/core/error.hpp"
#include "humo/core/hash.hpp"

namespace humo {

RunDir::RunDir(std::filesystem::path dir, std::string command, Json resolved_config)
    : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(resolved_config)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
}

void verify_artifact(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) throw MissingArtifactError(file.string());
  const std::filesystem::path record = file.parent_path() / kRunRecord;
  if (!std::filesystem::exists(record)) return;
  const Json j = read_json_file(record);
  const std::string name = file.filename().string();
  if (!j.contains("outputs") || !j.at("outputs").contains(name)) return;
  const std::string expected = j.at("outputs").at(name).get<std::string>();
  const std::string actual = hash_file(file);
  if (expected != actual) throw HashMismatchError(file.string(), expected, actual);
}

void RunDir::add_input(const std::string& name, const std::filesystem::path& file) {
  verify_artifact(file);
  inputs_[name] = {{"path", file.string()}, {"hash", hash_file(file)}};
}

void RunDir::add_output(const std::string& name) { outputs_.push_back(name); }

void RunDir::add_metric(const std::string& key, Json value) { metrics_[key] = std::move(value); }

void RunDir::finalize() const {
  Json outputs = Json::object();
  for (const std::string& name : outputs_) {
    const std::filesystem::path p = dir_ / name;
    if (!std::filesystem::exists(p)) throw MissingArtifactError(p.string());
    outputs[name] = hash_file(p);
  }
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command_;
  j["config"] = config_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs;
  j["metrics"] = metrics_;
  write_json_file(dir_ / kRunRecord, j);
}

}  // namespace humo
