#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace humo {

/// Incremental 64-bit FNV-1a. Used for content hashes of artifacts; not cryptographic.
class Fnv1a {
 public:
  void update(std::span<const std::byte> bytes);
  void update(std::string_view text);
  void update(double value);
  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hash_string(std::string_view text);
std::string hash_file(const std::filesystem::path& path);

}  // namespace humo
