#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"
#include "humo/eval/metrics.hpp"
#include "humo/generator/detokenize.hpp"
#include "humo/generator/sample.hpp"
#include "humo/generator/train.hpp"
#include "humo/generator/transformer.hpp"
#include "humo/generator/vocab.hpp"
#include "humo/motion/synth.hpp"
#include "humo/nn/grad_check.hpp"
#include "humo/nn/ops.hpp"

using namespace humo;

namespace {

GeneratorConfig small_config(std::size_t K = 16, std::size_t words = 12) {
  GeneratorConfig c;
  c.layers = 2;
  c.heads = 2;
  c.dim = 16;
  c.ffn_dim = 32;
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

}  // namespace

TEST_CASE("text tokenization") {
  const WordVocab v = WordVocab::build({"A robot squats.", "a robot waves its left hand"});
  const std::vector<int> ids = text_tokenize("a robot squats", v);
  CHECK(ids.size() == 3);
  for (int id : ids) CHECK(id != WordVocab::kUnk);
  const std::vector<int> unk = text_tokenize("a robot dances", v);
  CHECK(unk[2] == WordVocab::kUnk);
  CHECK(text_tokenize("", v).empty());
  CHECK(split_words("Hello, World's  end!") == std::vector<std::string>{"hello", "world's", "end"});
  const WordVocab back = WordVocab::from_json(v.to_json());
  CHECK(back.words() == v.words());
  CHECK(back.id("squats") == v.id("squats"));
}

TEST_CASE("motion vocabulary layout") {
  const MotionVocab mv{64};
  CHECK(mv.bos() == 64);
  CHECK(mv.eos() == 65);
  CHECK(mv.pad() == 66);
  CHECK(mv.size() == 67);
  CHECK(mv.is_motion(63));
  CHECK(!mv.is_motion(64));
}

TEST_CASE("prefix mask") {
  // enumerate the rule over 4 positions
  const std::vector<std::uint8_t> m = build_prefix_mask(2, 2);
  const std::vector<std::uint8_t> expect{1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 1, 0, 1, 1, 1, 1};
  CHECK(m == expect);
  const std::vector<std::uint8_t> causal = build_prefix_mask(0, 3);
  CHECK(causal == std::vector<std::uint8_t>{1, 0, 0, 1, 1, 0, 1, 1, 1});
  CHECK(build_prefix_mask(3, 0) == std::vector<std::uint8_t>(9, 1));
}

TEST_CASE("forward logits respect the prefix mask") {
  Generator g(small_config());
  Rng rng(2);
  const std::vector<int> text = random_ids(4, 12, rng);
  std::vector<int> motion = random_ids(6, 16, rng);
  const nn::Tensor base = g.logits(text, motion);
  CHECK(base.shape() == nn::Shape{6, 19});
  motion[4] = (motion[4] + 3) % 16;
  const nn::Tensor pert = g.logits(text, motion);
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t v = 0; v < 19; ++v) REQUIRE(base[t * 19 + v] == pert[t * 19 + v]);

  std::vector<int> text2 = text;
  text2[3] = (text2[3] + 1) % 12;
  const nn::Tensor other = g.logits(text2, motion);
  for (std::size_t t = 0; t < 6; ++t) {
    double diff = 0.0;
    for (std::size_t v = 0; v < 19; ++v) diff += std::abs(other[t * 19 + v] - pert[t * 19 + v]);
    CHECK(diff > 0.0);
  }
  CHECK_THROWS_AS(g.logits(random_ids(9, 12, rng), motion), DimensionError);
  CHECK_THROWS_AS(g.logits(text, random_ids(17, 16, rng)), DimensionError);
}

TEST_CASE("zero output projection gives uniform predictions") {
  Generator g(small_config());
  g.params().get("out.w").fill(0.0);
  const std::vector<int> text{1, 2};
  const std::vector<int> motion{16, 3, 4};
  const nn::Tensor lg = g.logits(text, motion);
  nn::Tape t;
  const nn::Var p = nn::softmax(t.constant(lg));
  for (double v : p.value().values()) CHECK(v == doctest::Approx(1.0 / 19).epsilon(1e-12));
}

TEST_CASE("nll loss") {
  const MotionVocab mv{16};
  nn::Tape t;
  const std::vector<int> targets{1, 5, mv.eos()};
  const nn::Var uniform = nll_loss(t.constant(nn::Tensor({3, 19}, 0.7)), targets, mv);
  CHECK(std::abs(uniform.value().item() - std::log(19.0)) < 1e-12);
  nn::Tensor sharp({3, 19}, 0.0);
  for (std::size_t r = 0; r < 3; ++r) sharp[r * 19 + static_cast<std::size_t>(targets[r])] = 80.0;
  CHECK(nll_loss(t.constant(sharp), targets, mv).value().item() < 1e-30);
  const std::vector<int> padded{1, mv.pad(), mv.pad()};
  nn::Tensor lg({3, 19}, 0.0);
  lg[1] = 2.0;
  const double only_first = nll_loss(t.constant(lg), padded, mv).value().item();
  CHECK(only_first == doctest::Approx(-std::log(std::exp(2.0) / (std::exp(2.0) + 18.0))));
  CHECK_THROWS_AS(nll_loss(t.constant(lg), std::vector<int>{1, 2}, mv), DimensionError);
}

TEST_CASE("generator nll passes grad_check") {
  GeneratorConfig cfg = small_config(6, 5);
  cfg.dim = 8;
  cfg.ffn_dim = 8;
  cfg.layers = 1;
  const Generator g(cfg);
  const std::vector<int> text{1, 3};
  const TeacherForcing tf = teacher_forcing(std::vector<int>{2, 5, 0}, cfg.motion_vocab());
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    Rng rng(40, k);
    std::vector<nn::Tensor> point;
    for (std::size_t i = 0; i < g.params().count(); ++i) {
      nn::Tensor p = g.params().at(i);
      for (double& v : p.values()) v += 0.1 * rng.normal();
      point.push_back(p);
    }
    worst = std::max(worst, nn::grad_check(
                                [&](nn::Tape& tape, std::span<const nn::Var> leaves) {
                                  nn::Binding bind(tape, g.params());
                                  for (std::size_t i = 0; i < leaves.size(); ++i) bind.set(g.params().names()[i], leaves[i]);
                                  return nll_loss(g.forward(bind, text, tf.inputs), tf.targets, cfg.motion_vocab());
                                },
                                point));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("teacher forcing and scoring") {
  const MotionVocab mv{16};
  const TeacherForcing tf = teacher_forcing(std::vector<int>{3, 4}, mv);
  CHECK(tf.inputs == std::vector<int>{16, 3, 4});
  CHECK(tf.targets == std::vector<int>{3, 4, 17});
  CHECK_THROWS_AS(teacher_forcing(std::vector<int>{16}, mv), ValidationError);

  Generator g(small_config());
  const std::vector<int> text{1};
  const std::vector<int> motion{3, 4};
  const SequenceScore s = score_sequence(g, text, motion);
  nn::Tape t;
  nn::Binding bind(t, g.params());
  const double loss = nll_loss(g.forward(bind, text, tf.inputs), tf.targets, mv).value().item();
  CHECK(s.mean_nll == doctest::Approx(loss).epsilon(1e-12));
  CHECK(s.positions == 3);
}

TEST_CASE("sampling rules") {
  const MotionVocab mv{4};
  const std::vector<double> logits{1.0, 3.0, 3.0, 0.5, 9.0, 2.0, 9.0};  // BOS and PAD are never drawn
  Candidates greedy = sampling_candidates(logits, mv, 0.0, 50);
  CHECK(greedy.ids == std::vector<int>{1});
  Candidates top1 = sampling_candidates(logits, mv, 1.0, 1);
  CHECK(top1.ids == greedy.ids);
  Candidates top3 = sampling_candidates(logits, mv, 1.0, 3);
  CHECK(top3.ids == std::vector<int>{1, 2, 5});
  double sum = 0.0;
  for (double p : top3.probs) sum += p;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(top3.probs[0] == doctest::Approx(std::exp(3.0) / (2 * std::exp(3.0) + std::exp(2.0))));
  CHECK_THROWS_AS(sampling_candidates(logits, mv, -1.0, 1), ValidationError);

  Generator g(small_config());
  const std::vector<int> text{2, 3};
  SamplingConfig s;
  s.max_len = 10;
  s.temperature = 0.0;
  const std::vector<int> a = sample(g, text, s, 1);
  CHECK(a == sample(g, text, s, 99));
  SamplingConfig k1 = s;
  k1.temperature = 1.0;
  k1.top_k = 1;
  CHECK(sample(g, text, k1, 5) == a);
  SamplingConfig warm = s;
  warm.temperature = 1.0;
  warm.top_k = 0;
  CHECK(sample(g, text, warm, 7) == sample(g, text, warm, 7));
  for (int id : sample(g, text, warm, 7)) CHECK((id >= 0 && id < 16));
  CHECK(sample(g, text, warm, 7).size() <= 10);
}

TEST_CASE("generator memorizes a small corpus") {
  Rng rng(12);
  std::vector<GeneratorPair> pairs;
  for (int i = 0; i < 4; ++i) pairs.push_back({{i, 4 + i}, random_ids(12, 16, rng)});
  GeneratorConfig cfg = small_config(16, 8);
  cfg.dim = 32;
  cfg.heads = 2;
  cfg.ffn_dim = 64;
  cfg.train.steps = 400;
  cfg.train.batch_size = 4;
  cfg.train.lr = 3e-3;
  Generator a(cfg), b(cfg);
  const std::vector<double> ca = train_generator(a, pairs);
  CHECK(ca == train_generator(b, pairs));
  SamplingConfig greedy;
  greedy.temperature = 0.0;
  greedy.max_len = 15;
  for (const auto& p : pairs) {
    CHECK(sample(a, p.text, greedy, 0) == p.motion);
    CHECK(std::exp(score_sequence(a, p.text, p.motion).log_prob) >= 0.99);
  }
  CHECK(mean_nll(a, pairs) < 0.01);

  const auto path = std::filesystem::temp_directory_path() / "humo_gen_test.ckpt";
  const WordVocab words = WordVocab::build({"a b c d e f g"});
  save_generator(path.string(), a, words);
  const LoadedGenerator back = load_generator(path.string());
  CHECK(back.words.words() == words.words());
  CHECK(sample(back.model, pairs[0].text, greedy, 0) == pairs[0].motion);
  std::filesystem::remove(path);
}

TEST_CASE("model size ladder and config") {
  GeneratorConfig c = small_config();
  apply_model_size(c, "l");
  CHECK(c.layers == 6);
  CHECK(c.dim == 256);
  CHECK(c.heads == 8);
  CHECK_THROWS_AS(apply_model_size(c, "xl"), ValidationError);
  c.heads = 7;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  const GeneratorConfig d = generator_config_from_json(generator_config_to_json(small_config()));
  CHECK(generator_config_to_json(d) == generator_config_to_json(small_config()));
}

TEST_CASE("decoding tokens to a clip") {
  const RobotModel& model = default_robot_model();
  TokenizerConfig tc;
  tc.width = 8;
  tc.blocks_per_stage = 1;
  tc.fsq.levels = {4, 4, 4};
  const Tokenizer tok(tc);
  NormStats stats;
  stats.mean.assign(137, 0.0);
  stats.std.assign(137, 1.0);
  const std::vector<int> ids{1, 5, 63};
  const DecodedMotion d = decode_motion(ids, tok, stats, model);
  CHECK(d.clip.size() == 12);
  CHECK(d.rows.rows() == 12);
  CHECK(std::isfinite(d.consistency));
  CHECK_THROWS_AS(decode_motion(std::vector<int>{}, tok, stats, model), ValidationError);
  CHECK_THROWS_AS(decode_motion(std::vector<int>{64}, tok, stats, model), ValidationError);

  // a clip encoded from FK-consistent rows decodes to the same frames the tokenizer rebuilds
  const MotionClip clip = synth_motion(MotionFamily::wave, SynthParams{}, 1, 1.0, model);
  const RowMatrix rows = clip_to_rows(model, clip);
  const std::vector<int> tokens = tok.tokenize(normalize(rows, stats));
  const DecodedMotion r = decode_motion(tokens, tok, stats, model);
  const RowMatrix direct = denormalize(tok.reconstruct(normalize(rows, stats)), stats);
  CHECK(r.rows.topRows(rows.rows()) == direct);
}
