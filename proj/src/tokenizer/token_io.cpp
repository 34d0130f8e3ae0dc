#include "humo/tokenizer/token_io.hpp"

#include <sstream>

#include "humo/core/error.hpp"

namespace humo {

std::string serialize_tokens(const TokenFile& f) {
  Json header;
  header["format_version"] = kTokenFormatVersion;
  header["kind"] = "tokens";
  header["codebook_size"] = f.codebook_size;
  header["quantizer"] = f.quantizer;
  if (f.quantizer == "fsq") header["levels"] = f.levels;
  else header["S"] = f.codebook_size;
  header["downsample_factor"] = f.downsample_factor;
  header["model_hash"] = f.model_hash;
  header["count"] = f.sequences.size();
  std::string out = header.dump() + "\n";
  for (const auto& s : f.sequences) {
    Json line{{"id", s.id}, {"text", s.text}, {"frames", s.frames}, {"tokens", s.tokens}};
    out += line.dump() + "\n";
  }
  return out;
}

TokenFile parse_tokens(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  TokenFile f;
  std::size_t expected = 0;
  try {
    if (!std::getline(in, line)) throw ParseError("token file: missing header");
    ++lineno;
    const Json h = Json::parse(line);
    const int version = h.at("format_version").get<int>();
    if (version != kTokenFormatVersion) throw VersionError("token file format_version " + std::to_string(version) + " is not supported");
    f.codebook_size = h.at("codebook_size").get<std::size_t>();
    f.quantizer = h.at("quantizer").get<std::string>();
    if (h.contains("levels")) f.levels = h.at("levels").get<std::vector<int>>();
    f.downsample_factor = h.at("downsample_factor").get<std::size_t>();
    f.model_hash = h.at("model_hash").get<std::string>();
    expected = h.at("count").get<std::size_t>();
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      TokenSequence s;
      s.id = j.at("id").get<std::string>();
      s.text = j.value("text", std::string());
      s.frames = j.at("frames").get<std::size_t>();
      s.tokens = j.at("tokens").get<std::vector<int>>();
      for (int t : s.tokens)
        if (t < 0 || static_cast<std::size_t>(t) >= f.codebook_size)
          throw CorruptRecordError(lineno, "token " + std::to_string(t) + " outside codebook");
      f.sequences.push_back(std::move(s));
    }
  } catch (const Json::exception& e) {
    throw CorruptRecordError(lineno, e.what());
  }
  if (f.sequences.size() != expected) {
    throw CorruptRecordError(lineno, "expected " + std::to_string(expected) + " sequences, found " +
                                         std::to_string(f.sequences.size()));
  }
  return f;
}

void write_token_file(const std::filesystem::path& path, const TokenFile& file) {
  write_text_file(path, serialize_tokens(file));
}

TokenFile read_token_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingArtifactError(path.string());
  return parse_tokens(read_text_file(path));
}

}  // namespace humo
