#include "humo/tokenizer/train.hpp"

#include <cmath>
#include <numbers>

#include "humo/core/error.hpp"
#include "humo/nn/adam.hpp"

namespace humo {

double codebook_usage(std::span<const int> tokens, std::size_t codebook_size) {
  if (codebook_size == 0) throw ValidationError("codebook_usage: codebook size must be positive");
  std::vector<bool> seen(codebook_size, false);
  std::size_t distinct = 0;
  for (int t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= codebook_size) {
      throw ValidationError("codebook_usage: token " + std::to_string(t) + " outside codebook of " +
                            std::to_string(codebook_size));
    }
    if (!seen[static_cast<std::size_t>(t)]) {
      seen[static_cast<std::size_t>(t)] = true;
      ++distinct;
    }
  }
  return static_cast<double>(distinct) / static_cast<double>(codebook_size);
}

Json training_curve_to_json(const TrainingCurve& curve) {
  Json usage = Json::array();
  for (const auto& u : curve.usage) usage.push_back({{"step", u.step}, {"usage", u.usage}});
  return Json{{"loss", curve.loss}, {"usage", usage}, {"resets", curve.resets}};
}

namespace {

nn::Tensor sample_batch(const std::vector<RowMatrix>& corpus, std::size_t batch, std::size_t window, Rng& rng) {
  const auto D = static_cast<std::size_t>(corpus.front().cols());
  nn::Tensor out({batch, window, D});
  for (std::size_t b = 0; b < batch; ++b) {
    const RowMatrix& clip = corpus[rng.below(corpus.size())];
    const auto T = static_cast<std::size_t>(clip.rows());
    const std::size_t start = T > window ? rng.below(T - window + 1) : 0;
    for (std::size_t t = 0; t < window; ++t) {
      const auto src = static_cast<Eigen::Index>(std::min(start + t, T - 1));
      std::copy_n(clip.row(src).data(), D, out.data() + (b * window + t) * D);
    }
  }
  return out;
}

}  // namespace

TrainingCurve train_tokenizer(Tokenizer& tok, const std::vector<RowMatrix>& corpus, const TrainProgress& progress) {
  const TokenizerConfig& cfg = tok.config();
  if (corpus.empty()) throw ValidationError("train_tokenizer: empty corpus");
  std::size_t frames = 0;
  for (const RowMatrix& c : corpus) {
    if (static_cast<std::size_t>(c.cols()) != cfg.input_dim || c.rows() == 0) {
      throw DimensionError("train_tokenizer: clip of shape " + std::to_string(c.rows()) + "x" +
                           std::to_string(c.cols()) + " for input_dim " + std::to_string(cfg.input_dim));
    }
    frames += static_cast<std::size_t>(c.rows());
  }
  const TokenizerTrainConfig& tc = cfg.train;
  const std::size_t epoch = std::max<std::size_t>(1, frames / (tc.batch_size * tc.window));
  Rng rng(tc.seed, 0xba7c4);
  Rng reset_rng(tc.seed, 0x5e7);
  nn::Adam adam(nn::AdamConfig{tc.lr, 0.9, 0.999, 1e-8, tc.clip_norm});
  TrainingCurve curve;
  std::vector<int> epoch_tokens;
  const bool vq = cfg.quantizer == QuantizerKind::vq;

  for (std::size_t step = 0; step < tc.steps; ++step) {
    const nn::Tensor batch = sample_batch(corpus, tc.batch_size, tc.window, rng);
    nn::Tape tape;
    nn::Binding bind(tape, tok.params());
    if (vq && !tok.vq_state().initialized) {
      nn::Tape probe;
      nn::Binding pb(probe, tok.params());
      vq_init_from_batch(tok.vq_state(), tok.encode(pb, probe.constant(batch)).value(), reset_rng);
    }
    Tokenizer::Step st;
    try {
      st = tok.forward(bind, batch);
      if (!std::isfinite(st.loss.value().item())) throw DivergenceError(step);
      tape.backward(st.loss);
    } catch (const NonFiniteError&) {
      throw DivergenceError(step);
    }
    const double loss = st.loss.value().item();
    double lr = tc.lr;
    if (tc.cosine_schedule) lr = tc.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) / static_cast<double>(tc.steps)));
    adam.step(tok.params(), bind.gradients(), std::max(lr, 1e-12));
    if (!tok.params().all_finite()) throw DivergenceError(step);
    if (vq) {
      std::vector<std::size_t> assign(st.q.indices.begin(), st.q.indices.end());
      curve.resets += vq_ema_update(tok.vq_state(), cfg.vq, st.q.latent.value(), assign, reset_rng);
    }
    curve.loss.push_back(loss);
    epoch_tokens.insert(epoch_tokens.end(), st.q.indices.begin(), st.q.indices.end());
    if ((step + 1) % epoch == 0 || step + 1 == tc.steps) {
      curve.usage.push_back({step + 1, codebook_usage(epoch_tokens, tok.codebook_size())});
      epoch_tokens.clear();
    }
    if (progress) progress(step, loss);
  }
  return curve;
}

}  // namespace humo
