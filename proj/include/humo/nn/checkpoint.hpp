#pragma once

#include <string>

#include "humo/core/json_io.hpp"
#include "humo/nn/parameters.hpp"

namespace humo::nn {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Json meta = Json::object();
  Parameters params;
};

/// Manifest line (JSON: format_version, meta, tensors[name, shape, offset]) followed by
/// the tensors as little-endian float64, concatenated in manifest order.
std::string serialize_checkpoint(const Parameters& params, const Json& meta);
Checkpoint parse_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const Parameters& params, const Json& meta);
Checkpoint load_checkpoint(const std::string& path);

/// Copies every tensor of `src` into `dst`, requiring identical names and shapes.
void assign_parameters(Parameters& dst, const Parameters& src);

}  // namespace humo::nn
