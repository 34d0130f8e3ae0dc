#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "humo/core/json_io.hpp"
#include "humo/kinematics/representation.hpp"
#include "humo/nn/parameters.hpp"

namespace humo {

struct EvaluatorConfig {
  std::size_t input_dim = 137;
  std::size_t vocab_size = 0;  // word ids are in [0, vocab_size)
  std::size_t width = 64;      // conv channels
  std::size_t word_dim = 64;
  std::size_t embed_dim = 64;
  double lr = 1e-3;
  std::size_t batch_size = 16;
  std::size_t steps = 600;
  std::size_t window = 64;  // training crop length in frames
  std::uint64_t seed = 0;
  double initial_temperature = 0.07;

  void validate() const;
};

Json evaluator_config_to_json(const EvaluatorConfig& config);
EvaluatorConfig evaluator_config_from_json(const Json& j);

/// One text/motion pair: normalized representation rows and word ids.
struct EvalPair {
  RowMatrix motion;
  std::vector<int> text;
};

/// Contrastive text/motion embedder. Motion: three conv blocks, mean over time, linear.
/// Text: mean of word embeddings, linear. Both outputs are unit norm.
class Evaluator {
 public:
  explicit Evaluator(EvaluatorConfig config);

  const EvaluatorConfig& config() const { return config_; }
  nn::Parameters& params() { return params_; }
  const nn::Parameters& params() const { return params_; }

  /// x: [B, T, D] -> [B, E].
  nn::Var embed_motion(nn::Binding& bind, nn::Var x) const;
  /// One sequence of word ids per row -> [B, E]. Empty sequences embed the bias alone.
  nn::Var embed_text(nn::Binding& bind, const std::vector<std::vector<int>>& texts) const;
  /// exp(learned log scale).
  double logit_scale() const;

  Eigen::MatrixXd motion_embeddings(const std::vector<RowMatrix>& clips) const;
  Eigen::MatrixXd text_embeddings(const std::vector<std::vector<int>>& texts) const;

 private:
  EvaluatorConfig config_;
  nn::Parameters params_;
};

/// Symmetric in-batch contrastive loss over `pairs`.
nn::Var contrastive_loss(nn::Binding& bind, const Evaluator& model, const nn::Tensor& motions,
                         const std::vector<std::vector<int>>& texts);

/// Seeded Adam training on random crops. Returns the per-step loss. Throws ValidationError
/// when fewer than 2 pairs or batch_size < 2, DivergenceError on a non-finite loss.
std::vector<double> train_evaluator(Evaluator& model, const std::vector<EvalPair>& pairs);

void save_evaluator(const std::string& path, const Evaluator& model, const Json& extra_meta = Json::object());
Evaluator load_evaluator(const std::string& path);

}  // namespace humo
