#include "humo/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>

#include "humo/core/error.hpp"

namespace humo::nn {

namespace {

void put_le(std::string& out, double v) {
  std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

double get_le(const char* p) {
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<double>(u);
}

}  // namespace

std::string serialize_checkpoint(const Parameters& params, const Json& meta) {
  Json manifest;
  manifest["format_version"] = kCheckpointVersion;
  manifest["meta"] = meta;
  manifest["tensors"] = Json::array();
  std::size_t offset = 0;
  for (std::size_t i = 0; i < params.count(); ++i) {
    manifest["tensors"].push_back({{"name", params.names()[i]}, {"shape", params.at(i).shape()}, {"offset", offset}});
    offset += params.at(i).size();
  }
  std::string out = manifest.dump() + "\n";
  out.reserve(out.size() + offset * 8);
  for (std::size_t i = 0; i < params.count(); ++i)
    for (double v : params.at(i).values()) put_le(out, v);
  return out;
}

Checkpoint parse_checkpoint(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw ParseError("checkpoint: missing manifest line");
  Json manifest;
  try {
    manifest = Json::parse(bytes.substr(0, nl));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("checkpoint manifest: ") + e.what());
  }
  Checkpoint ck;
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw VersionError("checkpoint format_version " + std::to_string(version) + " is not supported");
    }
    ck.meta = manifest.value("meta", Json::object());
    const std::size_t blob = bytes.size() - nl - 1;
    if (blob % 8 != 0) throw ParseError("checkpoint: tensor payload is not a whole number of float64 values");
    const std::size_t available = blob / 8;
    for (const Json& t : manifest.at("tensors")) {
      const Shape shape = t.at("shape").get<Shape>();
      const std::size_t offset = t.at("offset").get<std::size_t>();
      const std::size_t n = shape_size(shape);
      if (offset + n > available) throw ParseError("checkpoint: tensor " + t.at("name").get<std::string>() + " is truncated");
      std::vector<double> data(n);
      const char* base = bytes.data() + nl + 1 + offset * 8;
      for (std::size_t i = 0; i < n; ++i) data[i] = get_le(base + i * 8);
      ck.params.add(t.at("name").get<std::string>(), Tensor(shape, std::move(data)));
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("checkpoint manifest: ") + e.what());
  }
  return ck;
}

void save_checkpoint(const std::string& path, const Parameters& params, const Json& meta) {
  write_text_file(path, serialize_checkpoint(params, meta));
}

Checkpoint load_checkpoint(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError(path);
  return parse_checkpoint(read_text_file(path));
}

void assign_parameters(Parameters& dst, const Parameters& src) {
  if (dst.names() != src.names()) throw ValidationError("checkpoint parameter names do not match the model");
  for (std::size_t i = 0; i < dst.count(); ++i) {
    if (dst.at(i).shape() != src.at(i).shape()) {
      throw DimensionError("checkpoint tensor " + dst.names()[i] + " has shape " + shape_str(src.at(i).shape()) +
                           ", model expects " + shape_str(dst.at(i).shape()));
    }
    dst.at(i) = src.at(i);
  }
}

}  // namespace humo::nn
