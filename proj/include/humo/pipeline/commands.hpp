#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "humo/core/json_io.hpp"
#include "humo/pipeline/config.hpp"

namespace humo {

/// Receives one structured record per progress update or result.
using Emit = std::function<void(const Json&)>;

const std::vector<std::string>& command_names();

/// `<workspace>/<stage>` for a subcommand, e.g. train-tokenizer -> work/tokenizer.
std::filesystem::path default_output_dir(const RunConfig& config, const std::string& command);

/// Runs one subcommand, writing into `out` (default_output_dir when empty). Throws the
/// library error types; ValidationError for an unknown command.
void run_command(const std::string& command, const RunConfig& config, const std::filesystem::path& out,
                 const Emit& emit = {});

}  // namespace humo
