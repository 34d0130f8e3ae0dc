// humo: command-line entry point for the motion pipeline.
#include <CLI11.hpp>

#include <iostream>

#include "humo/core/error.hpp"
#include "humo/pipeline/commands.hpp"

namespace {

void print(const humo::Json& record) { std::cout << record.dump() << std::endl; }

int fail(int code, const char* kind, const std::exception& e) {
  print(humo::Json{{"event", "error"}, {"kind", kind}, {"message", e.what()}});
  std::cerr << "humo: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-to-motion pipeline for a humanoid robot"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  humo::CliOverrides overrides;
  std::uint64_t seed = 0;
  std::string quantizer, model_size;
  std::size_t codebook_size = 0;

  for (const std::string& name : humo::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Run config (JSON)")->required();
    sub->add_option("--out", out, "Output directory (default: <workspace>/<stage>)");
    sub->add_option("--seed", seed, "Overrides the config seed");
    sub->add_option("--quantizer", quantizer, "Tokenizer quantizer")->check(CLI::IsMember({"vq", "fsq"}));
    sub->add_option("--codebook-size", codebook_size, "Tokenizer codebook size");
    sub->add_option("--model-size", model_size, "Generator size")->check(CLI::IsMember({"s", "m", "l"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--quantizer")) overrides.quantizer = quantizer;
  if (sub->count("--codebook-size")) overrides.codebook_size = codebook_size;
  if (sub->count("--model-size")) overrides.model_size = model_size;

  try {
    const humo::RunConfig config = humo::load_run_config(config_path, overrides);
    humo::run_command(sub->get_name(), config, out, print);
  } catch (const humo::ValidationError& e) {
    return fail(1, "validation", e);
  } catch (const humo::ParseError& e) {
    return fail(1, "parse", e);
  } catch (const humo::MissingArtifactError& e) {
    return fail(1, "missing_artifact", e);
  } catch (const humo::HashMismatchError& e) {
    return fail(1, "hash_mismatch", e);
  } catch (const humo::VersionError& e) {
    return fail(1, "version", e);
  } catch (const humo::CorruptRecordError& e) {
    return fail(1, "corrupt_record", e);
  } catch (const humo::DimensionError& e) {
    return fail(1, "dimension", e);
  } catch (const humo::DivergenceError& e) {
    return fail(2, "divergence", e);
  } catch (const std::exception& e) {
    return fail(2, "runtime", e);
  }
  return 0;
}
