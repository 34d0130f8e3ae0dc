#include "humo/generator/transformer.hpp"

#include <cmath>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"
#include "humo/nn/checkpoint.hpp"
#include "humo/nn/ops.hpp"

namespace humo {

using nn::Tensor;
using nn::Var;

namespace {

constexpr double kMaskValue = -1e9;

std::string lname(std::size_t layer, const char* what) { return "l" + std::to_string(layer) + "." + what; }

}  // namespace

void GeneratorConfig::validate() const {
  if (layers == 0 || heads == 0 || dim == 0 || ffn_dim == 0) throw ValidationError("generator: sizes must be positive");
  if (dim % heads != 0) throw ValidationError("generator: dim " + std::to_string(dim) + " is not divisible by heads " + std::to_string(heads));
  if (codebook_size < 2) throw ValidationError("generator: codebook_size must be at least 2");
  if (text_vocab == 0) throw ValidationError("generator: text_vocab must be positive");
  if (max_motion < 2) throw ValidationError("generator: max_motion must be at least 2");
  if (dropout != 0.0) throw ValidationError("generator: dropout must be 0");
  if (!(train.lr > 0.0) || train.batch_size == 0) throw ValidationError("generator: bad training settings");
  if (sampling.temperature < 0.0) throw ValidationError("generator: temperature must be >= 0");
}

void apply_model_size(GeneratorConfig& c, const std::string& size) {
  if (size == "s") {
    c.layers = 2;
    c.dim = 64;
  } else if (size == "m") {
    c.layers = 4;
    c.dim = 128;
  } else if (size == "l") {
    c.layers = 6;
    c.dim = 256;
  } else {
    throw ValidationError("model_size: expected s, m or l, got " + size);
  }
  c.heads = c.dim / 32;
  c.ffn_dim = 2 * c.dim;
}

Json generator_config_to_json(const GeneratorConfig& c) {
  return Json{{"layers", c.layers},
              {"heads", c.heads},
              {"dim", c.dim},
              {"ffn_dim", c.ffn_dim},
              {"max_text", c.max_text},
              {"max_motion", c.max_motion},
              {"codebook_size", c.codebook_size},
              {"text_vocab", c.text_vocab},
              {"dropout", c.dropout},
              {"train",
               {{"lr", c.train.lr},
                {"batch_size", c.train.batch_size},
                {"steps", c.train.steps},
                {"seed", c.train.seed},
                {"clip_norm", c.train.clip_norm}}},
              {"sampling",
               {{"temperature", c.sampling.temperature}, {"top_k", c.sampling.top_k}, {"max_len", c.sampling.max_len},
                {"min_len", c.sampling.min_len}}}};
}

GeneratorConfig generator_config_from_json(const Json& j) {
  GeneratorConfig c;
  if (j.contains("model_size")) apply_model_size(c, j.at("model_size").get<std::string>());
  c.layers = j.value("layers", c.layers);
  c.heads = j.value("heads", c.heads);
  c.dim = j.value("dim", c.dim);
  c.ffn_dim = j.value("ffn_dim", c.ffn_dim);
  c.max_text = j.value("max_text", c.max_text);
  c.max_motion = j.value("max_motion", c.max_motion);
  c.codebook_size = j.value("codebook_size", c.codebook_size);
  c.text_vocab = j.value("text_vocab", c.text_vocab);
  c.dropout = j.value("dropout", c.dropout);
  if (j.contains("train")) {
    const Json& t = j.at("train");
    c.train.lr = t.value("lr", c.train.lr);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.steps = t.value("steps", c.train.steps);
    c.train.seed = t.value("seed", c.train.seed);
    c.train.clip_norm = t.value("clip_norm", c.train.clip_norm);
  }
  if (j.contains("sampling")) {
    const Json& s = j.at("sampling");
    c.sampling.temperature = s.value("temperature", c.sampling.temperature);
    c.sampling.top_k = s.value("top_k", c.sampling.top_k);
    c.sampling.max_len = s.value("max_len", c.sampling.max_len);
    c.sampling.min_len = s.value("min_len", c.sampling.min_len);
  }
  return c;
}

Generator::Generator(GeneratorConfig config) : config_(std::move(config)) {
  config_.validate();
  Rng rng(config_.train.seed, 0x9e4);
  const std::size_t d = config_.dim, f = config_.ffn_dim, V = config_.motion_vocab().size();
  params_.add("text.embed", nn::randn({config_.text_vocab, d}, rng, 0.02));
  params_.add("motion.embed", nn::randn({V, d}, rng, 0.02));
  params_.add("text.pos", nn::randn({config_.max_text, d}, rng, 0.02));
  params_.add("motion.pos", nn::randn({config_.max_motion, d}, rng, 0.02));
  for (std::size_t l = 0; l < config_.layers; ++l) {
    params_.add(lname(l, "norm1"), Tensor({d}, 1.0));
    params_.add(lname(l, "wq"), nn::init_uniform({d, d}, d, rng));
    params_.add(lname(l, "wk"), nn::init_uniform({d, d}, d, rng));
    params_.add(lname(l, "wv"), nn::init_uniform({d, d}, d, rng));
    params_.add(lname(l, "wo"), nn::init_uniform({d, d}, d, rng));
    params_.add(lname(l, "norm2"), Tensor({d}, 1.0));
    params_.add(lname(l, "ffn.w1"), nn::init_uniform({d, f}, d, rng));
    params_.add(lname(l, "ffn.b1"), Tensor({f}, 0.0));
    params_.add(lname(l, "ffn.w2"), nn::init_uniform({f, d}, f, rng));
    params_.add(lname(l, "ffn.b2"), Tensor({d}, 0.0));
  }
  params_.add("out.norm", Tensor({d}, 1.0));
  params_.add("out.w", nn::init_uniform({d, V}, d, rng));
  params_.add("out.b", Tensor({V}, 0.0));
}

Var Generator::block(nn::Binding& bind, std::size_t l, Var h, const std::vector<std::uint8_t>& blocked) const {
  const std::size_t n = h.shape()[0], d = config_.dim, H = config_.heads, dh = d / H;
  auto heads = [&](Var x) { return nn::permute(nn::reshape(x, {n, H, dh}), {1, 0, 2}); };  // [H, n, dh]
  Var x = nn::rmsnorm(h, bind(lname(l, "norm1")));
  Var q = heads(nn::matmul(x, bind(lname(l, "wq"))));
  Var k = heads(nn::matmul(x, bind(lname(l, "wk"))));
  Var v = heads(nn::matmul(x, bind(lname(l, "wv"))));
  Var scores = nn::scale(nn::bmm(q, nn::permute(k, {0, 2, 1})), 1.0 / std::sqrt(static_cast<double>(dh)));
  Var attn = nn::softmax(nn::masked_fill(scores, blocked, kMaskValue));
  Var ctx = nn::reshape(nn::permute(nn::bmm(attn, v), {1, 0, 2}), {n, d});
  h = nn::add(h, nn::matmul(ctx, bind(lname(l, "wo"))));
  Var y = nn::rmsnorm(h, bind(lname(l, "norm2")));
  y = nn::relu(nn::add(nn::matmul(y, bind(lname(l, "ffn.w1"))), bind(lname(l, "ffn.b1"))));
  y = nn::add(nn::matmul(y, bind(lname(l, "ffn.w2"))), bind(lname(l, "ffn.b2")));
  return nn::add(h, y);
}

Var Generator::forward(nn::Binding& bind, std::span<const int> text, std::span<const int> motion) const {
  const std::size_t nt = text.size(), nm = motion.size();
  if (nm == 0) throw DimensionError("generator: empty motion input");
  if (nt > config_.max_text) {
    throw DimensionError("generator: " + std::to_string(nt) + " text tokens exceed max_text " + std::to_string(config_.max_text));
  }
  if (nm > config_.max_motion) {
    throw DimensionError("generator: " + std::to_string(nm) + " motion positions exceed max_motion " +
                         std::to_string(config_.max_motion));
  }
  const MotionVocab mv = config_.motion_vocab();
  for (int id : text)
    if (id < 0 || static_cast<std::size_t>(id) >= config_.text_vocab) throw ValidationError("generator: text id " + std::to_string(id) + " out of range");
  for (int id : motion)
    if (id < 0 || static_cast<std::size_t>(id) >= mv.size()) throw ValidationError("generator: motion id " + std::to_string(id) + " out of range");

  std::vector<int> mpos(nm);
  for (std::size_t i = 0; i < nm; ++i) mpos[i] = static_cast<int>(i);
  Var m = nn::add(nn::embedding(bind("motion.embed"), motion), nn::embedding(bind("motion.pos"), mpos));
  Var h = m;
  if (nt > 0) {
    std::vector<int> tpos(nt);
    for (std::size_t i = 0; i < nt; ++i) tpos[i] = static_cast<int>(i);
    Var t = nn::add(nn::embedding(bind("text.embed"), text), nn::embedding(bind("text.pos"), tpos));
    h = nn::concat({t, m}, 0);
  }
  std::vector<std::uint8_t> blocked = build_prefix_mask(nt, nm);
  for (auto& b : blocked) b = b ? 0 : 1;
  for (std::size_t l = 0; l < config_.layers; ++l) h = block(bind, l, h, blocked);
  Var hm = nt > 0 ? nn::slice(h, 0, nt, nt + nm) : h;
  return nn::add(nn::matmul(nn::rmsnorm(hm, bind("out.norm")), bind("out.w")), bind("out.b"));
}

Tensor Generator::logits(std::span<const int> text, std::span<const int> motion) const {
  nn::Tape tape;
  nn::Binding bind(tape, params_);
  return forward(bind, text, motion).value();
}

TeacherForcing teacher_forcing(std::span<const int> motion, const MotionVocab& vocab) {
  TeacherForcing tf;
  tf.inputs.push_back(vocab.bos());
  for (int id : motion) {
    if (!vocab.is_motion(id)) throw ValidationError("teacher forcing: id " + std::to_string(id) + " is not a motion token");
    tf.inputs.push_back(id);
    tf.targets.push_back(id);
  }
  tf.targets.push_back(vocab.eos());
  return tf;
}

Var nll_loss(Var logits, std::span<const int> targets, const MotionVocab& vocab) {
  if (logits.shape().size() != 2 || logits.shape()[0] != targets.size()) {
    throw DimensionError("nll: logits " + nn::shape_str(logits.shape()) + " for " + std::to_string(targets.size()) + " targets");
  }
  return nn::cross_entropy(logits, targets, vocab.pad());
}

SequenceScore score_sequence(const Generator& model, std::span<const int> text, std::span<const int> motion) {
  const MotionVocab mv = model.config().motion_vocab();
  const TeacherForcing tf = teacher_forcing(motion, mv);
  const Tensor lg = model.logits(text, tf.inputs);
  const std::size_t V = lg.dim(1);
  SequenceScore s;
  for (std::size_t r = 0; r < tf.targets.size(); ++r) {
    const double* row = lg.data() + r * V;
    double mx = row[0];
    for (std::size_t v = 1; v < V; ++v) mx = std::max(mx, row[v]);
    double z = 0.0;
    for (std::size_t v = 0; v < V; ++v) z += std::exp(row[v] - mx);
    s.log_prob += row[tf.targets[r]] - mx - std::log(z);
  }
  s.positions = tf.targets.size();
  s.mean_nll = -s.log_prob / static_cast<double>(s.positions);
  return s;
}

void save_generator(const std::string& path, const Generator& model, const WordVocab& words, const Json& extra_meta) {
  Json meta = extra_meta;
  meta["kind"] = "generator";
  meta["config"] = generator_config_to_json(model.config());
  meta["words"] = words.to_json();
  nn::save_checkpoint(path, model.params(), meta);
}

LoadedGenerator load_generator(const std::string& path) {
  const nn::Checkpoint ck = nn::load_checkpoint(path);
  if (ck.meta.value("kind", std::string()) != "generator") throw ValidationError(path + " is not a generator checkpoint");
  LoadedGenerator out{Generator(generator_config_from_json(ck.meta.at("config"))), WordVocab::from_json(ck.meta.at("words")),
                      ck.meta};
  nn::assign_parameters(out.model.params(), ck.params);
  return out;
}

}  // namespace humo
