#include "humo/tokenizer/vq.hpp"

#include <limits>

#include "humo/core/error.hpp"
#include "humo/nn/ops.hpp"

namespace humo {

void VqConfig::validate() const {
  if (codebook_size < 2) throw ValidationError("vq: codebook_size must be >= 2");
  if (code_dim == 0) throw ValidationError("vq: code_dim must be positive");
  if (!(commitment > 0.0)) throw ValidationError("vq: commitment weight must be positive");
  if (!(ema_decay >= 0.0 && ema_decay <= 1.0)) throw ValidationError("vq: ema_decay must lie in [0, 1]");
  if (reset_threshold == 0) throw ValidationError("vq: reset_threshold must be positive");
}

VqState VqState::empty(const VqConfig& config) {
  VqState s;
  s.codebook = nn::Tensor({config.codebook_size, config.code_dim}, 0.0);
  s.ema_count = nn::Tensor({config.codebook_size}, 1.0);
  s.ema_sum = nn::Tensor({config.codebook_size, config.code_dim}, 0.0);
  s.unused.assign(config.codebook_size, 0);
  return s;
}

std::size_t vq_nearest(std::span<const double> z, const nn::Tensor& codebook) {
  if (codebook.rank() != 2 || codebook.dim(0) == 0) throw ValidationError("vq: empty codebook");
  const std::size_t S = codebook.dim(0), D = codebook.dim(1);
  if (z.size() != D) throw DimensionError("vq: query of length " + std::to_string(z.size()) + " for code_dim " + std::to_string(D));
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < S; ++k) {
    const double* c = codebook.data() + k * D;
    double d = 0.0;
    for (std::size_t i = 0; i < D; ++i) d += (z[i] - c[i]) * (z[i] - c[i]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::vector<std::size_t> vq_assign(const nn::Tensor& z, const nn::Tensor& codebook) {
  const std::size_t D = codebook.rank() == 2 ? codebook.dim(1) : 0;
  if (D == 0 || z.size() % D != 0) throw DimensionError("vq: latent " + nn::shape_str(z.shape()) + " vs codebook " + nn::shape_str(codebook.shape()));
  const std::size_t N = z.size() / D;
  std::vector<std::size_t> out(N);
  for (std::size_t n = 0; n < N; ++n) out[n] = vq_nearest(z.values().subspan(n * D, D), codebook);
  return out;
}

void vq_init_from_batch(VqState& state, const nn::Tensor& z, Rng& rng) {
  const std::size_t S = state.codebook.dim(0), D = state.codebook.dim(1);
  const std::size_t N = z.size() / D;
  if (N == 0) throw ValidationError("vq: cannot initialize from an empty batch");
  std::vector<std::size_t> order(N);
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t k = 0; k < S; ++k) {
    const std::size_t src = k < N ? order[k] : static_cast<std::size_t>(rng.below(N));
    for (std::size_t i = 0; i < D; ++i) {
      state.codebook[k * D + i] = z[src * D + i];
      state.ema_sum[k * D + i] = z[src * D + i];
    }
    state.ema_count[k] = 1.0;
    state.unused[k] = 0;
  }
  state.initialized = true;
}

std::size_t vq_ema_update(VqState& state, const VqConfig& config, const nn::Tensor& z,
                          std::span<const std::size_t> assignment, Rng& rng) {
  const std::size_t S = state.codebook.dim(0), D = state.codebook.dim(1);
  const std::size_t N = assignment.size();
  if (z.size() != N * D) throw DimensionError("vq: assignment count does not match the batch");
  std::vector<double> counts(S, 0.0);
  std::vector<double> sums(S * D, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t k = assignment[n];
    counts[k] += 1.0;
    for (std::size_t i = 0; i < D; ++i) sums[k * D + i] += z[n * D + i];
  }
  const double decay = config.ema_decay;
  double total = 0.0;
  for (std::size_t k = 0; k < S; ++k) {
    state.ema_count[k] = decay * state.ema_count[k] + (1.0 - decay) * counts[k];
    for (std::size_t i = 0; i < D; ++i)
      state.ema_sum[k * D + i] = decay * state.ema_sum[k * D + i] + (1.0 - decay) * sums[k * D + i];
    total += state.ema_count[k];
  }
  if (decay < 1.0) {
    for (std::size_t k = 0; k < S; ++k) {
      if (state.ema_count[k] <= 0.0) continue;
      const double size = (state.ema_count[k] + kVqLaplaceEps) / (total + S * kVqLaplaceEps) * total;
      for (std::size_t i = 0; i < D; ++i) state.codebook[k * D + i] = state.ema_sum[k * D + i] / size;
    }
  }
  std::size_t resets = 0;
  for (std::size_t k = 0; k < S; ++k) {
    state.unused[k] = counts[k] > 0.0 ? 0 : state.unused[k] + 1;
    if (state.unused[k] < config.reset_threshold || N == 0) continue;
    const std::size_t src = static_cast<std::size_t>(rng.below(N));
    for (std::size_t i = 0; i < D; ++i) {
      state.codebook[k * D + i] = z[src * D + i];
      state.ema_sum[k * D + i] = z[src * D + i];
    }
    state.ema_count[k] = 1.0;
    state.unused[k] = 0;
    ++resets;
  }
  return resets;
}

VqOutput vq_quantize(nn::Var z, const nn::Tensor& codebook) {
  VqOutput out;
  const std::size_t D = codebook.rank() == 2 ? codebook.dim(1) : 0;
  if (z.shape().empty() || z.shape().back() != D) {
    throw DimensionError("vq: latent " + nn::shape_str(z.shape()) + " vs codebook " + nn::shape_str(codebook.shape()));
  }
  out.indices = vq_assign(z.value(), codebook);
  nn::Tensor codes(z.shape());
  for (std::size_t n = 0; n < out.indices.size(); ++n)
    std::copy_n(codebook.data() + out.indices[n] * D, D, codes.data() + n * D);
  out.codes = z.tape().constant(codes);
  out.quantized = nn::straight_through(z, std::move(codes));
  return out;
}

nn::Var vq_loss(nn::Var x, nn::Var x_hat, nn::Var z, nn::Var z_hat, double commitment) {
  return nn::add(nn::mse(x, x_hat), nn::scale(nn::mse(z, nn::detach(z_hat)), commitment));
}

}  // namespace humo
