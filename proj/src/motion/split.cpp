#include "humo/motion/split.hpp"

#include <cmath>
#include <numeric>

#include "humo/core/error.hpp"

namespace humo {

SplitIndices split_indices(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  if (n == 0) throw ValidationError("split: empty corpus");
  if (!(ratios.train > 0 && ratios.test > 0 && ratios.val > 0)) throw ValidationError("split: ratios must be positive");
  if (std::abs(ratios.train + ratios.test + ratios.val - 1.0) > 1e-9) throw ValidationError("split: ratios must sum to 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, 0x5b117);
  rng.shuffle(order);
  const auto n_test = static_cast<std::size_t>(std::lround(static_cast<double>(n) * ratios.test));
  const auto n_val = static_cast<std::size_t>(std::lround(static_cast<double>(n) * ratios.val));
  if (n_test + n_val > n) throw ValidationError("split: rounding leaves no room for train");
  const std::size_t n_train = n - n_test - n_val;
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                  order.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
  out.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_test), order.end());
  return out;
}

}  // namespace humo
