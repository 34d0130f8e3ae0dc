#include "humo/tokenizer/fsq.hpp"

#include <cmath>

#include "humo/core/error.hpp"
#include "humo/nn/ops.hpp"

namespace humo {

std::size_t FsqConfig::codebook_size() const {
  std::size_t n = 1;
  for (int l : levels) n *= static_cast<std::size_t>(l);
  return n;
}

void FsqConfig::validate() const {
  if (levels.empty()) throw ValidationError("fsq: empty level list");
  for (int l : levels)
    if (l < 2) throw ValidationError("fsq: every level must be >= 2, got " + std::to_string(l));
}

std::vector<int> fsq_levels_for_size(std::size_t codebook_size) {
  switch (codebook_size) {
    case 64: return {4, 4, 4};
    case 256: return {4, 4, 4, 4};
    case 1024: return {4, 4, 4, 4, 4};
    case 4096: return {8, 8, 8, 8};
    case 65536: return {16, 16, 16, 16};
    default: break;
  }
  throw ValidationError("fsq: no level ladder for codebook size " + std::to_string(codebook_size));
}

namespace {

double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

void check_length(std::size_t n, std::span<const int> levels) {
  if (n != levels.size()) {
    throw DimensionError("fsq: latent of length " + std::to_string(n) + " for " + std::to_string(levels.size()) +
                         " levels");
  }
}

}  // namespace

std::vector<double> fsq_bound(std::span<const double> z, std::span<const int> levels) {
  check_length(z.size(), levels);
  std::vector<double> b(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) b[i] = (levels[i] - 1) * sigmoid(z[i]);
  return b;
}

FsqCode fsq_quantize(std::span<const double> z, std::span<const int> levels) {
  FsqCode out;
  out.bounded = fsq_bound(z, levels);
  out.code.resize(z.size());
  out.ste.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = std::min(std::floor(out.bounded[i] + 0.5), static_cast<double>(levels[i] - 1));
    out.code[i] = static_cast<int>(r);
    out.ste[i] = r;
  }
  return out;
}

std::size_t fsq_index_encode(std::span<const int> code, std::span<const int> levels) {
  check_length(code.size(), levels);
  std::size_t index = 0;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code[i] < 0 || code[i] >= levels[i]) {
      throw ValidationError("fsq: code " + std::to_string(code[i]) + " outside level " + std::to_string(levels[i]));
    }
    index = index * static_cast<std::size_t>(levels[i]) + static_cast<std::size_t>(code[i]);
  }
  return index;
}

std::vector<int> fsq_index_decode(std::size_t index, std::span<const int> levels) {
  std::size_t size = 1;
  for (int l : levels) size *= static_cast<std::size_t>(l);
  if (index >= size) throw ValidationError("fsq: index " + std::to_string(index) + " outside codebook of " + std::to_string(size));
  std::vector<int> code(levels.size());
  for (std::size_t i = levels.size(); i-- > 0;) {
    code[i] = static_cast<int>(index % static_cast<std::size_t>(levels[i]));
    index /= static_cast<std::size_t>(levels[i]);
  }
  return code;
}

nn::Var fsq_ste(nn::Var z, std::span<const int> levels, std::vector<int>* indices) {
  const std::size_t d = levels.size();
  if (z.shape().empty() || z.shape().back() != d) {
    throw DimensionError("fsq: latent shape " + nn::shape_str(z.shape()) + " does not end in " + std::to_string(d));
  }
  nn::Tape& tape = z.tape();
  nn::Tensor scale({d});
  for (std::size_t i = 0; i < d; ++i) scale[i] = levels[i] - 1;
  nn::Var bounded = nn::mul(nn::sigmoid(z), tape.constant(scale));

  const nn::Tensor& b = bounded.value();
  nn::Tensor rounded(b.shape());
  const std::size_t rows = b.size() / d;
  if (indices) indices->assign(rows, 0);
  std::vector<int> code(d);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < d; ++i) {
      const double v = b[r * d + i];
      const double q = std::min(std::floor(v + 0.5), static_cast<double>(levels[i] - 1));
      rounded[r * d + i] = q;
      code[i] = static_cast<int>(q);
    }
    if (indices) (*indices)[r] = static_cast<int>(fsq_index_encode(code, levels));
  }
  return nn::straight_through(bounded, std::move(rounded));
}

}  // namespace humo
