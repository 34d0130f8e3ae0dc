#include <cmath>

#include "harness.hpp"
#include "humo/core/rng.hpp"
#include "humo/eval/metrics.hpp"
#include "humo/generator/sample.hpp"
#include "humo/generator/train.hpp"
#include "humo/generator/transformer.hpp"
#include "humo/motion/norm.hpp"
#include "humo/motion/synth.hpp"
#include "humo/tokenizer/train.hpp"

namespace humo::acceptance {

namespace {

// ------------------------------------------------------------------ 6

TokenizerConfig overfit_config() {
  TokenizerConfig c;
  c.quantizer = QuantizerKind::fsq;
  c.fsq.levels = {8, 8, 8};
  c.width = 64;
  c.blocks_per_stage = 2;
  c.train.steps = 3000;
  c.train.lr = 3e-3;
  c.train.batch_size = 16;
  c.train.window = 64;
  c.train.cosine_schedule = true;
  c.train.seed = 0;
  return c;
}

Outcome tokenizer_overfit() {
  Checks c;
  const RobotModel& model = default_robot_model();
  const std::vector<MotionClip> clips = synth_corpus(CorpusOptions{8, 1, 0.15, 30.0}, model);
  std::vector<RowMatrix> raw, rows;
  for (const MotionClip& clip : clips) raw.push_back(clip_to_rows(model, clip));
  const NormStats stats = compute_norm_stats(raw);
  std::size_t frames = 0;
  for (const RowMatrix& r : raw) {
    rows.push_back(normalize(r, stats));
    frames += static_cast<std::size_t>(r.rows());
  }
  const FeatureLayout layout(model);
  auto train_error = [&](const Tokenizer& tok) {
    double e = 0.0;
    for (const RowMatrix& r : rows)
      e += normalized_mpjpe(tok.reconstruct(r), r, layout, model.keypoint_count()) * static_cast<double>(r.rows());
    return e / static_cast<double>(frames);
  };

  Stopwatch first;
  Tokenizer a(overfit_config());
  const TrainingCurve ca = train_tokenizer(a, rows);
  const double seconds = first.seconds();
  const double err = train_error(a);

  Tokenizer b(overfit_config());
  const TrainingCurve cb = train_tokenizer(b, rows);
  bool same = ca.loss == cb.loss;
  const nn::Parameters pa = a.export_tensors(), pb = b.export_tensors();
  for (std::size_t i = 0; i < pa.count() && same; ++i)
    for (std::size_t k = 0; k < pa.at(i).size() && same; ++k) same = pa.at(i)[k] == pb.at(i)[k];

  c.expect(err < 0.01, "train-set normalized MPJPE < 0.01");
  c.expect(same, "bit-identical repeated run");
  c.expect(seconds < 600.0, "runtime < 10 min");
  c.note("clips", clips.size());
  c.note("frames", frames);
  c.note("steps", overfit_config().train.steps);
  c.note("normalized_mpjpe", err);
  c.note("final_loss", ca.loss.back());
  c.note("train_seconds", seconds);
  return c.outcome();
}

// ------------------------------------------------------------------ 8

GeneratorConfig small_generator(std::size_t K, std::size_t words) {
  GeneratorConfig c;
  c.layers = 2;
  c.heads = 2;
  c.dim = 32;
  c.ffn_dim = 64;
  c.max_text = 8;
  c.max_motion = 16;
  c.codebook_size = K;
  c.text_vocab = words;
  c.train.seed = 1;
  return c;
}

std::vector<int> random_ids(std::size_t n, std::size_t V, Rng& rng) {
  std::vector<int> v(n);
  for (int& x : v) x = static_cast<int>(rng.below(V));
  return v;
}

Outcome generator_memorization() {
  Stopwatch sw;
  Checks c;
  Rng rng(12);
  std::vector<GeneratorPair> pairs;
  for (int i = 0; i < 4; ++i) pairs.push_back({{i, 4 + i}, random_ids(12, 16, rng)});
  GeneratorConfig cfg = small_generator(16, 8);
  cfg.train.steps = 400;
  cfg.train.batch_size = 4;
  cfg.train.lr = 3e-3;
  Generator g(cfg);
  train_generator(g, pairs);
  SamplingConfig greedy;
  greedy.temperature = 0.0;
  greedy.max_len = 15;
  int exact = 0;
  double min_prob = 1.0;
  for (const GeneratorPair& p : pairs) {
    exact += sample(g, p.text, greedy, 0) == p.motion;
    min_prob = std::min(min_prob, std::exp(score_sequence(g, p.text, p.motion).log_prob));
  }
  c.expect(exact == 4, "greedy decode reproduces every sequence");
  c.expect(min_prob >= 0.99, "sequence probability >= 0.99");
  c.expect(sw.seconds() < 600.0, "runtime < 10 min");
  c.note("exact", exact);
  c.note("min_sequence_prob", min_prob);
  return c.outcome();
}

// ------------------------------------------------------------------ 9

Outcome prefix_mask() {
  Checks c;
  const std::size_t K = 16, W = 12;
  std::size_t cases = 0, violations = 0;
  for (std::size_t nt = 0; nt <= 8; ++nt) {
    for (std::size_t nm = 1; nm <= 8; ++nm) {
      GeneratorConfig cfg = small_generator(K, W);
      cfg.dim = 16;
      cfg.ffn_dim = 32;
      cfg.train.seed = 100 + nt * 10 + nm;
      const Generator g(cfg);
      const std::size_t V = cfg.motion_vocab().size();
      Rng rng(nt, nm);
      const std::vector<int> text = random_ids(nt, W, rng);
      std::vector<int> motion = random_ids(nm, K, rng);
      motion[0] = cfg.motion_vocab().bos();
      const nn::Tensor base = g.logits(text, motion);
      // Changing the token at position j may only affect rows j.. of the output.
      for (std::size_t j = 1; j < nm; ++j) {
        std::vector<int> pert = motion;
        pert[j] = static_cast<int>((static_cast<std::size_t>(pert[j]) + 1 + rng.below(K - 1)) % K);
        const nn::Tensor out = g.logits(text, pert);
        ++cases;
        for (std::size_t t = 0; t < j; ++t)
          for (std::size_t v = 0; v < V; ++v)
            if (out[t * V + v] != base[t * V + v]) {
              ++violations;
              t = j;
              break;
            }
      }
    }
  }
  c.expect(violations == 0, "bit-invariance to future motion tokens");

  int sensitive = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Rng rng(900, trial);
    GeneratorConfig cfg = small_generator(K, W);
    cfg.dim = 16;
    cfg.ffn_dim = 32;
    cfg.train.seed = 5000 + trial;
    const Generator g(cfg);
    const std::size_t nt = 1 + rng.below(8), nm = 1 + rng.below(8);
    std::vector<int> text = random_ids(nt, W, rng);
    std::vector<int> motion = random_ids(nm, K, rng);
    motion[0] = cfg.motion_vocab().bos();
    const nn::Tensor base = g.logits(text, motion);
    const std::size_t pos = rng.below(nt);
    text[pos] = static_cast<int>((static_cast<std::size_t>(text[pos]) + 1 + rng.below(W - 1)) % W);
    const nn::Tensor out = g.logits(text, motion);
    double diff = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) diff += std::abs(out[i] - base[i]);
    sensitive += diff > 0.0;
  }
  c.expect(sensitive == 100, "text sensitivity in 100/100 trials");
  c.note("future_perturbations", cases);
  c.note("violations", violations);
  c.note("text_sensitive", sensitive);
  return c.outcome();
}

}  // namespace

std::vector<Criterion> model_criteria() {
  return {{6, "tokenizer overfit", tokenizer_overfit},
          {8, "generator memorization", generator_memorization},
          {9, "prefix-mask property", prefix_mask}};
}

}  // namespace humo::acceptance
