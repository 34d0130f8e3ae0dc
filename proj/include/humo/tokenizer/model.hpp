#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "humo/core/json_io.hpp"
#include "humo/kinematics/representation.hpp"
#include "humo/nn/parameters.hpp"
#include "humo/tokenizer/fsq.hpp"
#include "humo/tokenizer/vq.hpp"

namespace humo {

enum class QuantizerKind { fsq, vq };
const char* to_string(QuantizerKind kind);
QuantizerKind quantizer_from_string(const std::string& name);

struct TokenizerTrainConfig {
  double lr = 2e-4;
  std::size_t batch_size = 16;
  std::size_t steps = 3000;
  std::size_t window = 64;  // frames per training crop, a multiple of downsample_factor
  std::uint64_t seed = 0;
  bool cosine_schedule = false;
  double clip_norm = 1.0;
};

struct TokenizerConfig {
  std::size_t input_dim = 137;
  std::size_t width = 256;
  std::size_t blocks_per_stage = 2;
  std::size_t downsample_factor = 4;
  QuantizerKind quantizer = QuantizerKind::fsq;
  FsqConfig fsq;
  VqConfig vq;
  TokenizerTrainConfig train;

  std::size_t latent_dim() const;
  std::size_t codebook_size() const;
  void validate() const;
};

Json tokenizer_config_to_json(const TokenizerConfig& config);
/// Missing keys keep their defaults.
TokenizerConfig tokenizer_config_from_json(const Json& j);

/// Rows padded at the end by repeating the last row up to a multiple of `factor`.
RowMatrix pad_to_multiple(const RowMatrix& rows, std::size_t factor);

/// Convolutional encoder/decoder around a pluggable quantizer.
class Tokenizer {
 public:
  /// Random initialization from config.train.seed.
  explicit Tokenizer(TokenizerConfig config);

  const TokenizerConfig& config() const { return config_; }
  nn::Parameters& params() { return params_; }
  const nn::Parameters& params() const { return params_; }
  VqState& vq_state() { return vq_; }
  const VqState& vq_state() const { return vq_; }
  std::size_t codebook_size() const { return config_.codebook_size(); }

  /// x: [B, T, D] with T divisible by the downsample factor -> [B, T / factor, latent].
  nn::Var encode(nn::Binding& bind, nn::Var x) const;
  /// [B, T', latent] -> [B, T' * factor, D].
  nn::Var decode(nn::Binding& bind, nn::Var latents) const;

  struct Quantized {
    nn::Var decoder_input;  // straight-through value fed to the decoder
    nn::Var latent;         // encoder output z
    nn::Var target;         // VQ: selected codes (constant); FSQ: unused
    std::vector<int> indices;
  };
  /// Quantizes encoder output. VQ requires an initialized codebook.
  Quantized quantize(nn::Var z) const;

  struct Step {
    nn::Var loss;
    nn::Var recon;
    Quantized q;
  };
  /// Full forward pass and training loss on a batch [B, T, D].
  Step forward(nn::Binding& bind, const nn::Tensor& batch) const;

  /// Token ids of one normalized clip (padded internally by edge replication).
  std::vector<int> tokenize(const RowMatrix& rows) const;
  /// Normalized rows decoded from tokens, trimmed to `frames`.
  RowMatrix detokenize(const std::vector<int>& tokens, std::size_t frames) const;
  /// tokenize + detokenize.
  RowMatrix reconstruct(const RowMatrix& rows) const;

  /// Model weights plus quantizer buffers, for checkpointing.
  nn::Parameters export_tensors() const;
  void import_tensors(const nn::Parameters& tensors);

 private:
  nn::Var conv(nn::Binding& bind, const std::string& name, nn::Var x, std::size_t stride, std::size_t padding,
               std::size_t dilation = 1) const;
  nn::Var res_block(nn::Binding& bind, const std::string& name, nn::Var x, std::size_t dilation) const;
  void add_conv(const std::string& name, std::size_t k, std::size_t cin, std::size_t cout, Rng& rng);
  nn::Var codes_to_decoder_input(nn::Tape& tape, const std::vector<int>& tokens, std::size_t count) const;
  std::size_t stages() const;

  TokenizerConfig config_;
  nn::Parameters params_;
  VqState vq_;
};

void save_tokenizer(const std::string& path, const Tokenizer& tokenizer, const Json& extra_meta = Json::object());
Tokenizer load_tokenizer(const std::string& path);

}  // namespace humo
