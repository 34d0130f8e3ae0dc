#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "humo/core/json_io.hpp"

namespace humo {

inline constexpr int kTokenFormatVersion = 1;

struct TokenSequence {
  std::string id;
  std::string text;
  std::size_t frames = 0;  // original clip length before padding
  std::vector<int> tokens;
};

struct TokenFile {
  std::size_t codebook_size = 0;
  std::string quantizer;      // "fsq" or "vq"
  std::vector<int> levels;    // fsq only
  std::size_t downsample_factor = 4;
  std::string model_hash;     // hash of the tokenizer checkpoint
  std::vector<TokenSequence> sequences;
};

/// Header object on the first line, then one object per sequence with its integer list.
std::string serialize_tokens(const TokenFile& file);
TokenFile parse_tokens(const std::string& text);
void write_token_file(const std::filesystem::path& path, const TokenFile& file);
TokenFile read_token_file(const std::filesystem::path& path);

}  // namespace humo
