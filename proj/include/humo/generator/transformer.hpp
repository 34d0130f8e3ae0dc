#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "humo/core/json_io.hpp"
#include "humo/generator/vocab.hpp"
#include "humo/nn/parameters.hpp"

namespace humo {

struct GeneratorTrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 8;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
  double clip_norm = 1.0;
};

struct SamplingConfig {
  double temperature = 1.0;
  std::size_t top_k = 50;  // 0 keeps every candidate
  std::size_t max_len = 256;
  std::size_t min_len = 1;  // EOS is suppressed until this many motion tokens
};

struct GeneratorConfig {
  std::size_t layers = 2;
  std::size_t heads = 2;
  std::size_t dim = 64;
  std::size_t ffn_dim = 128;
  std::size_t max_text = 32;     // text positions
  std::size_t max_motion = 257;  // motion positions, BOS included
  std::size_t codebook_size = 0;
  std::size_t text_vocab = 0;
  double dropout = 0.0;
  GeneratorTrainConfig train;
  SamplingConfig sampling;

  MotionVocab motion_vocab() const { return MotionVocab{codebook_size}; }
  void validate() const;
};

/// Named ladder entries "s", "m", "l" -> (2, 64), (4, 128), (6, 256); heads = dim / 32,
/// ffn_dim = 2 * dim.
void apply_model_size(GeneratorConfig& config, const std::string& size);

Json generator_config_to_json(const GeneratorConfig& config);
GeneratorConfig generator_config_from_json(const Json& j);

/// Decoder-only transformer over [text ids | BOS m_1 ... m_n] with prefix-bidirectional
/// attention. Positions restart at zero for the motion segment.
class Generator {
 public:
  explicit Generator(GeneratorConfig config);

  const GeneratorConfig& config() const { return config_; }
  nn::Parameters& params() { return params_; }
  const nn::Parameters& params() const { return params_; }

  /// Logits [motion.size(), vocab] for every motion input position; row t predicts the
  /// token after motion[t].
  nn::Var forward(nn::Binding& bind, std::span<const int> text, std::span<const int> motion) const;
  nn::Tensor logits(std::span<const int> text, std::span<const int> motion) const;

 private:
  nn::Var block(nn::Binding& bind, std::size_t layer, nn::Var h, const std::vector<std::uint8_t>& blocked) const;

  GeneratorConfig config_;
  nn::Parameters params_;
};

/// Teacher-forcing inputs and targets for one pair: [BOS m...] and [m... EOS].
struct TeacherForcing {
  std::vector<int> inputs;
  std::vector<int> targets;
};
TeacherForcing teacher_forcing(std::span<const int> motion, const MotionVocab& vocab);

/// Mean NLL over positions whose target is not PAD. Throws DimensionError on a length
/// mismatch.
nn::Var nll_loss(nn::Var logits, std::span<const int> targets, const MotionVocab& vocab);

struct SequenceScore {
  double mean_nll = 0.0;
  double log_prob = 0.0;  // sum over target positions, EOS included
  std::size_t positions = 0;
};
SequenceScore score_sequence(const Generator& model, std::span<const int> text, std::span<const int> motion);

void save_generator(const std::string& path, const Generator& model, const WordVocab& words,
                    const Json& extra_meta = Json::object());
struct LoadedGenerator {
  Generator model;
  WordVocab words;
  Json meta;
};
LoadedGenerator load_generator(const std::string& path);

}  // namespace humo
