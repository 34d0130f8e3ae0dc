#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "humo/core/rng.hpp"

namespace humo {

struct SplitRatios {
  double train = 0.8;
  double test = 0.15;
  double val = 0.05;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::size_t> val;
};

/// Seeded shuffle of [0, n) then a contiguous cut. Test and val sizes are round(n * ratio);
/// train takes the remainder. Throws ValidationError for n == 0 or bad ratios.
SplitIndices split_indices(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);

template <class T>
std::array<std::vector<T>, 3> split_dataset(const std::vector<T>& items, const SplitRatios& ratios,
                                            std::uint64_t seed) {
  const SplitIndices idx = split_indices(items.size(), ratios, seed);
  std::array<std::vector<T>, 3> out;
  for (std::size_t i : idx.train) out[0].push_back(items[i]);
  for (std::size_t i : idx.test) out[1].push_back(items[i]);
  for (std::size_t i : idx.val) out[2].push_back(items[i]);
  return out;
}

}  // namespace humo
