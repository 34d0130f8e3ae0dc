#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "humo/nn/tape.hpp"

namespace humo {

struct FsqConfig {
  std::vector<int> levels{8, 8, 8};

  /// Product of the levels.
  std::size_t codebook_size() const;
  /// Throws ValidationError unless every level is >= 2.
  void validate() const;
};

/// Level ladder used for a given implicit codebook size (64, 256, 1024, 4096, 65536).
std::vector<int> fsq_levels_for_size(std::size_t codebook_size);

/// (L_i - 1) * sigmoid(z_i), in (0, L_i - 1).
std::vector<double> fsq_bound(std::span<const double> z, std::span<const int> levels);

struct FsqCode {
  std::vector<int> code;        // integers in [0, L_i - 1]
  std::vector<double> bounded;  // fsq_bound(z)
  std::vector<double> ste;      // forward value of bounded + sg(round(bounded) - bounded)
};

/// Half-up rounding of the bounded row.
FsqCode fsq_quantize(std::span<const double> z, std::span<const int> levels);

/// Big-endian mixed radix: index = sum code_i * prod_{j>i} L_j.
std::size_t fsq_index_encode(std::span<const int> code, std::span<const int> levels);
std::vector<int> fsq_index_decode(std::size_t index, std::span<const int> levels);

/// Differentiable quantizer over the last axis of z (size = levels.size()). Returns the
/// straight-through row; `indices` (if given) receives one code index per row.
nn::Var fsq_ste(nn::Var z, std::span<const int> levels, std::vector<int>* indices = nullptr);

}  // namespace humo
