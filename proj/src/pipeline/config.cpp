#include "humo/pipeline/config.hpp"

#include <cmath>
#include <set>

#include "humo/core/error.hpp"

namespace humo {

namespace {

const std::set<std::string> kTopLevelKeys{"seed",     "workspace",  "robot_model", "inputs",    "synth",
                                          "filter",   "split",      "retarget",    "tokenizer", "generator",
                                          "model_size", "evaluator", "generate",   "sweep"};

template <class T>
void read(const Json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError("config: field " + section + "." + key + " has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

void propagate_seed(RunConfig& c) {
  c.tokenizer.train.seed = c.seed;
  c.generator.train.seed = c.seed;
  c.evaluator.seed = c.seed;
  c.generate.seed = c.seed;
}

RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError("config: document must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kTopLevelKeys.count(key)) throw ValidationError("config: unknown field " + key);
  }
  RunConfig c;
  read(j, "seed", c.seed, "");
  std::string ws = c.workspace.string();
  read(j, "workspace", ws, "");
  c.workspace = resolve(base_dir, ws);
  std::string model;
  read(j, "robot_model", model, "");
  c.robot_model = resolve(base_dir, model);
  if (j.contains("inputs")) {
    c.inputs = j.at("inputs");
    if (!c.inputs.is_object()) throw ValidationError("config: field inputs must be an object");
    for (auto& [k, v] : c.inputs.items()) {
      if (!v.is_string()) throw ValidationError("config: field inputs." + k + " must be a path string");
      v = resolve(base_dir, v.get<std::string>()).string();
    }
  }
  propagate_seed(c);
  if (j.contains("synth")) {
    const Json& s = j.at("synth");
    read(s, "clips", c.synth.clips, "synth");
    read(s, "compose_probability", c.synth.compose_probability, "synth");
    read(s, "fps", c.synth.fps, "synth");
    read(s, "inject_defects", c.synth.inject_defects, "synth");
  }
  if (j.contains("filter")) {
    const Json& f = j.at("filter");
    read(f, "max_dof_velocity", c.filter.max_dof_velocity, "filter");
    read(f, "max_root_accel", c.filter.max_root_accel, "filter");
    read(f, "ground_penetration_tol", c.filter.ground_penetration_tol, "filter");
  }
  if (j.contains("split")) {
    const Json& s = j.at("split");
    read(s, "train", c.split.train, "split");
    read(s, "test", c.split.test, "split");
    read(s, "val", c.split.val, "split");
  }
  if (j.contains("retarget")) {
    const Json& r = j.at("retarget");
    read(r, "damping", c.retarget.ik.damping, "retarget");
    read(r, "tol", c.retarget.ik.tol, "retarget");
    read(r, "max_iters", c.retarget.ik.max_iters, "retarget");
    read(r, "smooth_window", c.retarget.smooth_window, "retarget");
  }
  try {
    if (j.contains("tokenizer")) c.tokenizer = tokenizer_config_from_json(j.at("tokenizer"));
    if (!j.contains("tokenizer") || !j.at("tokenizer").contains("train") || !j.at("tokenizer").at("train").contains("seed"))
      c.tokenizer.train.seed = c.seed;
    read(j, "model_size", c.model_size, "");
    if (j.contains("generator")) {
      Json g = j.at("generator");
      c.generator = generator_config_from_json(g);
      if (!g.contains("layers") && !g.contains("model_size")) apply_model_size(c.generator, c.model_size);
      if (!g.contains("train") || !g.at("train").contains("seed")) c.generator.train.seed = c.seed;
    } else {
      apply_model_size(c.generator, c.model_size);
      c.generator.train.seed = c.seed;
    }
    if (j.contains("evaluator")) {
      c.evaluator = evaluator_config_from_json(j.at("evaluator"));
      if (!j.at("evaluator").contains("seed")) c.evaluator.seed = c.seed;
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (j.contains("generate")) {
    const Json& g = j.at("generate");
    read(g, "prompt", c.generate.prompt, "generate");
    read(g, "seed", c.generate.seed, "generate");
  }
  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    read(s, "codebook_sizes", c.sweep.codebook_sizes, "sweep");
    read(s, "quantizers", c.sweep.quantizers, "sweep");
    read(s, "model_sizes", c.sweep.model_sizes, "sweep");
    read(s, "seeds", c.sweep.seeds, "sweep");
    read(s, "generation_codebooks", c.sweep.generation_codebooks, "sweep");
  }
  return c;
}

void apply_overrides(RunConfig& c, const CliOverrides& o) {
  if (o.seed) {
    c.seed = *o.seed;
    propagate_seed(c);
  }
  if (o.quantizer) c.tokenizer.quantizer = quantizer_from_string(*o.quantizer);
  if (o.codebook_size) {
    if (c.tokenizer.quantizer == QuantizerKind::fsq) c.tokenizer.fsq.levels = fsq_levels_for_size(*o.codebook_size);
    else c.tokenizer.vq.codebook_size = *o.codebook_size;
  }
  if (o.model_size) {
    c.model_size = *o.model_size;
    apply_model_size(c.generator, c.model_size);
  }
}

RunConfig load_run_config(const std::filesystem::path& path, const CliOverrides& overrides) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError(path.string());
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  RunConfig c = run_config_from_json(j, path.parent_path());
  apply_overrides(c, overrides);
  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (synth.clips == 0) throw ValidationError("config: synth.clips must be positive");
  if (!(synth.fps > 0.0)) throw ValidationError("config: synth.fps must be positive");
  if (synth.compose_probability < 0.0 || synth.compose_probability > 1.0)
    throw ValidationError("config: synth.compose_probability must lie in [0, 1]");
  if (!(split.train > 0 && split.test > 0 && split.val > 0))
    throw ValidationError("config: split ratios must be positive");
  if (std::abs(split.train + split.test + split.val - 1.0) > 1e-9)
    throw ValidationError("config: split ratios must sum to 1");
  filter.validate();
  tokenizer.validate();
  if (sweep.seeds.empty()) throw ValidationError("config: sweep.seeds must not be empty");
  for (const std::string& q : sweep.quantizers) quantizer_from_string(q);
  for (std::size_t s : sweep.codebook_sizes) fsq_levels_for_size(s);
  GeneratorConfig probe = generator;
  for (const std::string& m : sweep.model_sizes) apply_model_size(probe, m);
  if (generator.dim % generator.heads != 0) throw ValidationError("config: generator.dim must be divisible by heads");
}

Json run_config_to_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["workspace"] = c.workspace.string();
  j["robot_model"] = c.robot_model.string();
  j["inputs"] = c.inputs;
  j["synth"] = {{"clips", c.synth.clips},
                {"compose_probability", c.synth.compose_probability},
                {"fps", c.synth.fps},
                {"inject_defects", c.synth.inject_defects}};
  j["filter"] = {{"max_dof_velocity", c.filter.max_dof_velocity},
                 {"max_root_accel", c.filter.max_root_accel},
                 {"ground_penetration_tol", c.filter.ground_penetration_tol}};
  j["split"] = {{"train", c.split.train}, {"test", c.split.test}, {"val", c.split.val}};
  j["retarget"] = {{"damping", c.retarget.ik.damping},
                   {"tol", c.retarget.ik.tol},
                   {"max_iters", c.retarget.ik.max_iters},
                   {"smooth_window", c.retarget.smooth_window}};
  j["tokenizer"] = tokenizer_config_to_json(c.tokenizer);
  j["model_size"] = c.model_size;
  j["generator"] = generator_config_to_json(c.generator);
  j["evaluator"] = evaluator_config_to_json(c.evaluator);
  j["generate"] = {{"prompt", c.generate.prompt}, {"seed", c.generate.seed}};
  j["sweep"] = {{"codebook_sizes", c.sweep.codebook_sizes},
                {"quantizers", c.sweep.quantizers},
                {"model_sizes", c.sweep.model_sizes},
                {"seeds", c.sweep.seeds},
                {"generation_codebooks", c.sweep.generation_codebooks}};
  return j;
}

}  // namespace humo
