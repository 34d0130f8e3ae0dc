#include "humo/eval/evaluator.hpp"

#include <cmath>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"
#include "humo/nn/adam.hpp"
#include "humo/nn/checkpoint.hpp"
#include "humo/nn/ops.hpp"

namespace humo {

using nn::Tensor;
using nn::Var;

namespace {

constexpr double kMaxLogitScale = 4.605170185988092;  // ln 100

Tensor rows_tensor(const RowMatrix& rows) {
  return Tensor({1, static_cast<std::size_t>(rows.rows()), static_cast<std::size_t>(rows.cols())},
                std::vector<double>(rows.data(), rows.data() + rows.size()));
}

Eigen::MatrixXd to_matrix(const Tensor& t) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.dim(0)), static_cast<Eigen::Index>(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t j = 0; j < t.dim(1); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t[i * t.dim(1) + j];
  return m;
}

}  // namespace

void EvaluatorConfig::validate() const {
  if (input_dim == 0 || width == 0 || word_dim == 0 || embed_dim == 0) throw ValidationError("evaluator: dimensions must be positive");
  if (vocab_size == 0) throw ValidationError("evaluator: vocab_size must be positive");
  if (batch_size < 2) throw ValidationError("evaluator: batch_size must be at least 2");
  if (window < 4) throw ValidationError("evaluator: window must be at least 4 frames");
  if (!(lr > 0.0)) throw ValidationError("evaluator: lr must be positive");
  if (!(initial_temperature > 0.0)) throw ValidationError("evaluator: initial_temperature must be positive");
}

Json evaluator_config_to_json(const EvaluatorConfig& c) {
  return Json{{"input_dim", c.input_dim}, {"vocab_size", c.vocab_size}, {"width", c.width},
              {"word_dim", c.word_dim},   {"embed_dim", c.embed_dim},   {"lr", c.lr},
              {"batch_size", c.batch_size}, {"steps", c.steps},        {"window", c.window},
              {"seed", c.seed},           {"initial_temperature", c.initial_temperature}};
}

EvaluatorConfig evaluator_config_from_json(const Json& j) {
  EvaluatorConfig c;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.width = j.value("width", c.width);
  c.word_dim = j.value("word_dim", c.word_dim);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.lr = j.value("lr", c.lr);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.steps = j.value("steps", c.steps);
  c.window = j.value("window", c.window);
  c.seed = j.value("seed", c.seed);
  c.initial_temperature = j.value("initial_temperature", c.initial_temperature);
  return c;
}

Evaluator::Evaluator(EvaluatorConfig config) : config_(std::move(config)) {
  config_.validate();
  Rng rng(config_.seed, 0xe7a1);
  const std::size_t D = config_.input_dim, W = config_.width, E = config_.embed_dim;
  params_.add("motion.c0.w", nn::init_uniform({3, D, W}, 3 * D, rng));
  params_.add("motion.c0.b", Tensor({W}, 0.0));
  params_.add("motion.c1.w", nn::init_uniform({4, W, W}, 4 * W, rng));
  params_.add("motion.c1.b", Tensor({W}, 0.0));
  params_.add("motion.c2.w", nn::init_uniform({4, W, W}, 4 * W, rng));
  params_.add("motion.c2.b", Tensor({W}, 0.0));
  params_.add("motion.proj.w", nn::init_uniform({W, E}, W, rng));
  params_.add("motion.proj.b", Tensor({E}, 0.0));
  params_.add("text.embed", nn::randn({config_.vocab_size, config_.word_dim}, rng, 1.0));
  params_.add("text.proj.w", nn::init_uniform({config_.word_dim, E}, config_.word_dim, rng));
  params_.add("text.proj.b", Tensor({E}, 0.0));
  params_.add("logit_scale", Tensor({1}, std::log(1.0 / config_.initial_temperature)));
}

double Evaluator::logit_scale() const { return std::exp(params_.get("logit_scale")[0]); }

Var Evaluator::embed_motion(nn::Binding& bind, Var x) const {
  if (x.shape().size() != 3 || x.shape()[2] != config_.input_dim) {
    throw DimensionError("evaluator: motion batch " + nn::shape_str(x.shape()) + " for input_dim " +
                         std::to_string(config_.input_dim));
  }
  if (x.shape()[1] < 4) throw DimensionError("evaluator: clips need at least 4 frames");
  Var h = nn::relu(nn::conv1d(x, bind("motion.c0.w"), bind("motion.c0.b"), {1, 1, 1}));
  h = nn::relu(nn::conv1d(h, bind("motion.c1.w"), bind("motion.c1.b"), {2, 1, 1}));
  h = nn::relu(nn::conv1d(h, bind("motion.c2.w"), bind("motion.c2.b"), {2, 1, 1}));
  Var pooled = nn::mean_axis(h, 1);
  return nn::l2_normalize(nn::add(nn::matmul(pooled, bind("motion.proj.w")), bind("motion.proj.b")));
}

Var Evaluator::embed_text(nn::Binding& bind, const std::vector<std::vector<int>>& texts) const {
  nn::Tape& tape = bind.tape();
  const std::size_t B = texts.size();
  if (B == 0) throw DimensionError("evaluator: empty text batch");
  // bag of words as a [B, V] averaging matrix times the embedding table
  std::vector<int> ids;
  for (const auto& t : texts)
    for (int id : t) {
      if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
        throw ValidationError("evaluator: word id " + std::to_string(id) + " outside vocabulary of " +
                              std::to_string(config_.vocab_size));
      }
      ids.push_back(id);
    }
  Var pooled;
  if (ids.empty()) {
    pooled = tape.constant(Tensor({B, config_.word_dim}, 0.0));
  } else {
    Var rows = nn::embedding(bind("text.embed"), ids);  // [N, word_dim]
    Tensor w({B, ids.size()}, 0.0);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t i = 0; i < texts[b].size(); ++i) w[b * ids.size() + pos + i] = 1.0 / static_cast<double>(texts[b].size());
      pos += texts[b].size();
    }
    pooled = nn::matmul(tape.constant(w), rows);
  }
  return nn::l2_normalize(nn::add(nn::matmul(pooled, bind("text.proj.w")), bind("text.proj.b")));
}

Eigen::MatrixXd Evaluator::motion_embeddings(const std::vector<RowMatrix>& clips) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(clips.size()), static_cast<Eigen::Index>(config_.embed_dim));
  for (std::size_t i = 0; i < clips.size(); ++i) {
    nn::Tape tape;
    nn::Binding bind(tape, params_);
    out.row(static_cast<Eigen::Index>(i)) = to_matrix(embed_motion(bind, tape.constant(rows_tensor(clips[i]))).value()).row(0);
  }
  return out;
}

Eigen::MatrixXd Evaluator::text_embeddings(const std::vector<std::vector<int>>& texts) const {
  nn::Tape tape;
  nn::Binding bind(tape, params_);
  return to_matrix(embed_text(bind, texts).value());
}

Var contrastive_loss(nn::Binding& bind, const Evaluator& model, const Tensor& motions,
                     const std::vector<std::vector<int>>& texts) {
  nn::Tape& tape = bind.tape();
  const std::size_t B = texts.size();
  if (B < 2 || motions.dim(0) != B) throw ValidationError("evaluator: contrastive loss needs at least 2 aligned pairs");
  Var m = model.embed_motion(bind, tape.constant(motions));
  Var t = model.embed_text(bind, texts);
  Var scale = nn::exp(bind("logit_scale"));
  Var logits = nn::mul(nn::matmul(t, nn::permute(m, {1, 0})), scale);  // [text, motion]
  std::vector<int> targets(B);
  for (std::size_t i = 0; i < B; ++i) targets[i] = static_cast<int>(i);
  Var rows = nn::cross_entropy(logits, targets);
  Var cols = nn::cross_entropy(nn::permute(logits, {1, 0}), targets);
  return nn::scale(nn::add(rows, cols), 0.5);
}

std::vector<double> train_evaluator(Evaluator& model, const std::vector<EvalPair>& pairs) {
  const EvaluatorConfig& c = model.config();
  if (pairs.size() < 2) throw ValidationError("evaluator: need at least 2 pairs, got " + std::to_string(pairs.size()));
  for (const EvalPair& p : pairs)
    if (static_cast<std::size_t>(p.motion.cols()) != c.input_dim || p.motion.rows() == 0)
      throw DimensionError("evaluator: motion rows have " + std::to_string(p.motion.cols()) + " columns");
  const std::size_t B = std::min(c.batch_size, pairs.size());
  const std::size_t D = c.input_dim, W = c.window;
  Rng rng(c.seed, 0xc0de);
  nn::Adam adam(nn::AdamConfig{c.lr, 0.9, 0.999, 1e-8, 1.0});
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();
  std::vector<double> curve;
  for (std::size_t step = 0; step < c.steps; ++step) {
    Tensor motions({B, W, D});
    std::vector<std::vector<int>> texts;
    for (std::size_t b = 0; b < B; ++b) {
      if (cursor == order.size()) {
        rng.shuffle(order);
        cursor = 0;
      }
      const EvalPair& p = pairs[order[cursor++]];
      const auto T = static_cast<std::size_t>(p.motion.rows());
      const std::size_t start = T > W ? rng.below(T - W + 1) : 0;
      for (std::size_t t = 0; t < W; ++t) {
        const auto src = static_cast<Eigen::Index>(std::min(start + t, T - 1));
        std::copy_n(p.motion.row(src).data(), D, motions.data() + (b * W + t) * D);
      }
      texts.push_back(p.text);
    }
    nn::Tape tape;
    nn::Binding bind(tape, model.params());
    Var loss;
    try {
      loss = contrastive_loss(bind, model, motions, texts);
      if (!std::isfinite(loss.value().item())) throw DivergenceError(step);
      tape.backward(loss);
    } catch (const NonFiniteError&) {
      throw DivergenceError(step);
    }
    adam.step(model.params(), bind.gradients());
    double& ls = model.params().get("logit_scale")[0];
    ls = std::min(ls, kMaxLogitScale);
    curve.push_back(loss.value().item());
  }
  return curve;
}

void save_evaluator(const std::string& path, const Evaluator& model, const Json& extra_meta) {
  Json meta = extra_meta;
  meta["kind"] = "evaluator";
  meta["config"] = evaluator_config_to_json(model.config());
  nn::save_checkpoint(path, model.params(), meta);
}

Evaluator load_evaluator(const std::string& path) {
  const nn::Checkpoint ck = nn::load_checkpoint(path);
  if (ck.meta.value("kind", std::string()) != "evaluator") throw ValidationError(path + " is not an evaluator checkpoint");
  Evaluator e(evaluator_config_from_json(ck.meta.at("config")));
  nn::assign_parameters(e.params(), ck.params);
  return e;
}

}  // namespace humo
