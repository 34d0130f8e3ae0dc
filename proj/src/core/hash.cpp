#include "humo/core/hash.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <vector>

#include "humo/core/error.hpp"

namespace humo {

void Fnv1a::update(std::span<const std::byte> bytes) {
  for (std::byte b : bytes) {
    state_ ^= static_cast<std::uint64_t>(b);
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::update(std::string_view text) {
  update(std::as_bytes(std::span(text.data(), text.size())));
}

void Fnv1a::update(double value) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(value);
  std::byte buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::byte>((bits >> (8 * i)) & 0xff);
  update(std::span<const std::byte>(buf, 8));
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

std::string hash_string(std::string_view text) {
  Fnv1a h;
  h.update(text);
  return h.hex();
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Fnv1a h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    auto n = static_cast<std::size_t>(in.gcount());
    h.update(std::as_bytes(std::span(buf.data(), n)));
  }
  return h.hex();
}

}  // namespace humo
