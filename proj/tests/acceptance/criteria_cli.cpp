#include <cstdlib>
#include <filesystem>
#include <map>

#include "harness.hpp"
#include "humo/core/hash.hpp"
#include "humo/core/json_io.hpp"

namespace humo::acceptance {

namespace {

namespace fs = std::filesystem;

std::map<std::string, std::string> hash_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = hash_file(e.path());
  return out;
}

// ------------------------------------------------------------------ 12

Outcome idempotence() {
  Checks c;
  const fs::path dir = fs::temp_directory_path() / "humo_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Json cfg = read_json_file(fs::path(HUMO_SOURCE_DIR) / "configs" / "smoke.json");
  cfg["workspace"] = (dir / "work").string();
  write_json_file(dir / "config.json", cfg);

  const std::vector<std::string> commands{"synth",           "retarget",        "filter",   "split",
                                          "train-tokenizer", "train-evaluator", "train-generator", "generate",
                                          "eval",            "sweep-codebook",  "sweep-model-size"};
  auto run_all = [&](const std::string& log) {
    int failures = 0;
    for (const std::string& cmd : commands) {
      const std::string line = std::string("\"") + HUMO_CLI + "\" " + cmd + " --config \"" + (dir / "config.json").string() +
                               "\" >> \"" + (dir / log).string() + "\" 2>&1";
      failures += std::system(line.c_str()) != 0;
    }
    return failures;
  };
  const int first_failures = run_all("first.log");
  const auto first = hash_tree(dir / "work");
  const int second_failures = run_all("second.log");
  const auto second = hash_tree(dir / "work");

  std::size_t differing = 0;
  for (const auto& [name, h] : first) {
    const auto it = second.find(name);
    if (it == second.end() || it->second != h) {
      ++differing;
      c.expect(false, name + " differs");
    }
  }
  c.expect(first_failures == 0 && second_failures == 0, "every subcommand exits 0");
  c.expect(first.size() == second.size() && !first.empty(), "same output set");
  c.expect(differing == 0, "byte-identical outputs");
  c.note("subcommands", commands.size());
  c.note("files", first.size());
  c.note("differing", differing);
  if (c.outcome().pass) fs::remove_all(dir);
  return c.outcome();
}

}  // namespace

std::vector<Criterion> cli_criteria() { return {{12, "determinism and idempotence", idempotence}}; }

}  // namespace humo::acceptance
