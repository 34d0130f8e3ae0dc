#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "humo/core/rng.hpp"
#include "humo/nn/tape.hpp"

namespace humo {

struct VqConfig {
  std::size_t codebook_size = 256;
  std::size_t code_dim = 16;
  double commitment = 0.25;
  double ema_decay = 0.99;
  std::size_t reset_threshold = 16;  // consecutive unused batches before a reset

  void validate() const;
};

/// Codebook plus the EMA statistics that drive it.
struct VqState {
  nn::Tensor codebook;    // [S, code_dim]
  nn::Tensor ema_count;   // [S]
  nn::Tensor ema_sum;     // [S, code_dim]
  std::vector<std::size_t> unused;
  bool initialized = false;

  static VqState empty(const VqConfig& config);
};

inline constexpr double kVqLaplaceEps = 1e-5;

/// Nearest code by squared distance; ties go to the lowest index.
std::size_t vq_nearest(std::span<const double> z, const nn::Tensor& codebook);
/// Nearest code for every row of z ([N, code_dim]).
std::vector<std::size_t> vq_assign(const nn::Tensor& z, const nn::Tensor& codebook);

/// Seeds the codebook with rows drawn (with replacement when N < S) from a batch of
/// encoder outputs.
void vq_init_from_batch(VqState& state, const nn::Tensor& z, Rng& rng);

/// One EMA step with Laplace-smoothed cluster sizes. Codes whose EMA cluster size is zero
/// keep their vector. Codes unused for reset_threshold consecutive batches are replaced by
/// a random row of `z`. Returns the number of resets.
std::size_t vq_ema_update(VqState& state, const VqConfig& config, const nn::Tensor& z,
                          std::span<const std::size_t> assignment, Rng& rng);

struct VqOutput {
  nn::Var quantized;   // straight-through: z + sg(codes - z)
  nn::Var codes;       // constant copy of the selected codes
  std::vector<std::size_t> indices;
};

/// Quantizes the last axis of z.
VqOutput vq_quantize(nn::Var z, const nn::Tensor& codebook);

/// mse(x, x_hat) + commitment * mse(z, sg(z_hat)).
nn::Var vq_loss(nn::Var x, nn::Var x_hat, nn::Var z, nn::Var z_hat, double commitment);

}  // namespace humo
