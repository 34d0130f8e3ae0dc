#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "humo/core/json_io.hpp"
#include "humo/eval/evaluator.hpp"
#include "humo/generator/transformer.hpp"
#include "humo/kinematics/retarget.hpp"
#include "humo/motion/filter.hpp"
#include "humo/motion/split.hpp"
#include "humo/tokenizer/model.hpp"

namespace humo {

struct SynthConfig {
  std::size_t clips = 200;
  double compose_probability = 0.15;
  double fps = 30.0;
  std::size_t inject_defects = 0;  // extra defective clips appended after the clean ones
};

struct SweepConfig {
  std::vector<std::size_t> codebook_sizes{64, 256, 1024, 4096};
  std::vector<std::string> quantizers{"vq", "fsq"};
  std::vector<std::string> model_sizes{"s", "m", "l"};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  /// Stage-1 codebook sizes compared at the largest model size.
  std::vector<std::size_t> generation_codebooks{64, 1024};
};

struct GenerateConfig {
  std::string prompt = "a robot waves its left hand";
  std::uint64_t seed = 0;
};

/// Overrides given on the command line; applied after the file is read.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> quantizer;
  std::optional<std::size_t> codebook_size;
  std::optional<std::string> model_size;
};

/// Everything a subcommand needs. Paths are resolved against the config file directory.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path workspace = "work";
  std::filesystem::path robot_model;  // empty: bundled model
  Json inputs = Json::object();       // optional explicit artifact paths per subcommand
  SynthConfig synth;
  FilterLimits filter;
  SplitRatios split;
  RetargetConfig retarget;
  TokenizerConfig tokenizer;
  GeneratorConfig generator;
  std::string model_size = "s";
  EvaluatorConfig evaluator;
  GenerateConfig generate;
  SweepConfig sweep;

  void validate() const;
};

/// Parses a config document. Unknown top-level keys are rejected so typos surface as
/// validation errors naming the field.
RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path, const CliOverrides& overrides = {});
void apply_overrides(RunConfig& config, const CliOverrides& overrides);

/// Fully resolved config with every default spelled out; echoed into run directories.
Json run_config_to_json(const RunConfig& config);

/// Seeds of the sub-configs derived from the top-level seed.
void propagate_seed(RunConfig& config);

}  // namespace humo
