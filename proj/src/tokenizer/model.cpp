#include "humo/tokenizer/model.hpp"

#include <bit>
#include <cmath>

#include "humo/core/error.hpp"
#include "humo/nn/checkpoint.hpp"
#include "humo/nn/ops.hpp"

namespace humo {

using nn::Binding;
using nn::Tensor;
using nn::Var;

const char* to_string(QuantizerKind kind) { return kind == QuantizerKind::fsq ? "fsq" : "vq"; }

QuantizerKind quantizer_from_string(const std::string& name) {
  if (name == "fsq") return QuantizerKind::fsq;
  if (name == "vq") return QuantizerKind::vq;
  throw ValidationError("unknown quantizer '" + name + "' (expected fsq or vq)");
}

std::size_t TokenizerConfig::latent_dim() const {
  return quantizer == QuantizerKind::fsq ? fsq.levels.size() : vq.code_dim;
}

std::size_t TokenizerConfig::codebook_size() const {
  return quantizer == QuantizerKind::fsq ? fsq.codebook_size() : vq.codebook_size;
}

void TokenizerConfig::validate() const {
  if (input_dim == 0 || width == 0) throw ValidationError("tokenizer: input_dim and width must be positive");
  if (downsample_factor == 0 || !std::has_single_bit(downsample_factor)) {
    throw ValidationError("tokenizer: downsample_factor must be a power of two, got " + std::to_string(downsample_factor));
  }
  if (quantizer == QuantizerKind::fsq) fsq.validate();
  else vq.validate();
  if (train.batch_size == 0 || train.window == 0 || train.window % downsample_factor != 0) {
    throw ValidationError("tokenizer: training window must be a positive multiple of downsample_factor");
  }
  if (!(train.lr > 0.0)) throw ValidationError("tokenizer: lr must be positive");
}

Json tokenizer_config_to_json(const TokenizerConfig& c) {
  Json j;
  j["input_dim"] = c.input_dim;
  j["width"] = c.width;
  j["blocks_per_stage"] = c.blocks_per_stage;
  j["downsample_factor"] = c.downsample_factor;
  j["quantizer"] = to_string(c.quantizer);
  j["fsq"] = {{"levels", c.fsq.levels}};
  j["vq"] = {{"codebook_size", c.vq.codebook_size},
             {"code_dim", c.vq.code_dim},
             {"commitment", c.vq.commitment},
             {"ema_decay", c.vq.ema_decay},
             {"reset_threshold", c.vq.reset_threshold}};
  j["train"] = {{"lr", c.train.lr},
                {"batch_size", c.train.batch_size},
                {"steps", c.train.steps},
                {"window", c.train.window},
                {"seed", c.train.seed},
                {"cosine_schedule", c.train.cosine_schedule},
                {"clip_norm", c.train.clip_norm}};
  return j;
}

TokenizerConfig tokenizer_config_from_json(const Json& j) {
  TokenizerConfig c;
  try {
    c.input_dim = j.value("input_dim", c.input_dim);
    c.width = j.value("width", c.width);
    c.blocks_per_stage = j.value("blocks_per_stage", c.blocks_per_stage);
    c.downsample_factor = j.value("downsample_factor", c.downsample_factor);
    c.quantizer = quantizer_from_string(j.value("quantizer", std::string(to_string(c.quantizer))));
    if (j.contains("fsq")) {
      const Json& f = j.at("fsq");
      if (f.contains("levels")) c.fsq.levels = f.at("levels").get<std::vector<int>>();
      else if (f.contains("codebook_size")) c.fsq.levels = fsq_levels_for_size(f.at("codebook_size").get<std::size_t>());
    }
    if (j.contains("vq")) {
      const Json& v = j.at("vq");
      c.vq.codebook_size = v.value("codebook_size", c.vq.codebook_size);
      c.vq.code_dim = v.value("code_dim", c.vq.code_dim);
      c.vq.commitment = v.value("commitment", c.vq.commitment);
      c.vq.ema_decay = v.value("ema_decay", c.vq.ema_decay);
      c.vq.reset_threshold = v.value("reset_threshold", c.vq.reset_threshold);
    }
    if (j.contains("train")) {
      const Json& t = j.at("train");
      c.train.lr = t.value("lr", c.train.lr);
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
      c.train.steps = t.value("steps", c.train.steps);
      c.train.window = t.value("window", c.train.window);
      c.train.seed = t.value("seed", c.train.seed);
      c.train.cosine_schedule = t.value("cosine_schedule", c.train.cosine_schedule);
      c.train.clip_norm = t.value("clip_norm", c.train.clip_norm);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("tokenizer config: ") + e.what());
  }
  c.validate();
  return c;
}

RowMatrix pad_to_multiple(const RowMatrix& rows, std::size_t factor) {
  if (rows.rows() == 0) throw ValidationError("cannot pad an empty clip");
  const auto T = static_cast<std::size_t>(rows.rows());
  const std::size_t padded = (T + factor - 1) / factor * factor;
  RowMatrix out(static_cast<Eigen::Index>(padded), rows.cols());
  out.topRows(rows.rows()) = rows;
  for (std::size_t t = T; t < padded; ++t) out.row(static_cast<Eigen::Index>(t)) = rows.row(rows.rows() - 1);
  return out;
}

namespace {

Tensor rows_to_batch(const RowMatrix& rows) {
  const auto T = static_cast<std::size_t>(rows.rows()), D = static_cast<std::size_t>(rows.cols());
  return Tensor({1, T, D}, std::vector<double>(rows.data(), rows.data() + rows.size()));
}

RowMatrix batch_to_rows(const Tensor& t, std::size_t frames) {
  const std::size_t D = t.dim(2);
  RowMatrix out(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(D));
  std::copy_n(t.data(), frames * D, out.data());
  return out;
}

}  // namespace

Tokenizer::Tokenizer(TokenizerConfig config) : config_(std::move(config)) {
  config_.validate();
  Rng rng(config_.train.seed, 0x70c);
  const std::size_t W = config_.width, D = config_.input_dim, Z = config_.latent_dim();
  add_conv("enc.in", 3, D, W, rng);
  for (std::size_t s = 0; s < stages(); ++s) {
    const std::string p = "enc.s" + std::to_string(s);
    add_conv(p + ".down", 4, W, W, rng);
    for (std::size_t b = 0; b < config_.blocks_per_stage; ++b) {
      add_conv(p + ".r" + std::to_string(b) + ".a", 3, W, W, rng);
      add_conv(p + ".r" + std::to_string(b) + ".b", 1, W, W, rng);
    }
  }
  add_conv("enc.out", 3, W, Z, rng);
  add_conv("dec.in", 3, Z, W, rng);
  for (std::size_t s = 0; s < stages(); ++s) {
    const std::string p = "dec.s" + std::to_string(s);
    for (std::size_t b = 0; b < config_.blocks_per_stage; ++b) {
      add_conv(p + ".r" + std::to_string(b) + ".a", 3, W, W, rng);
      add_conv(p + ".r" + std::to_string(b) + ".b", 1, W, W, rng);
    }
    add_conv(p + ".up", 3, W, W, rng);
  }
  add_conv("dec.out", 3, W, D, rng);
  if (config_.quantizer == QuantizerKind::vq) vq_ = VqState::empty(config_.vq);
}

std::size_t Tokenizer::stages() const { return static_cast<std::size_t>(std::countr_zero(config_.downsample_factor)); }

void Tokenizer::add_conv(const std::string& name, std::size_t k, std::size_t cin, std::size_t cout, Rng& rng) {
  params_.add(name + ".w", nn::init_uniform({k, cin, cout}, k * cin, rng));
  params_.add(name + ".b", Tensor({cout}, 0.0));
}

Var Tokenizer::conv(Binding& bind, const std::string& name, Var x, std::size_t stride, std::size_t padding,
                    std::size_t dilation) const {
  return nn::conv1d(x, bind(name + ".w"), bind(name + ".b"), {stride, padding, dilation});
}

Var Tokenizer::res_block(Binding& bind, const std::string& name, Var x, std::size_t dilation) const {
  Var h = conv(bind, name + ".a", nn::relu(x), 1, dilation, dilation);
  h = conv(bind, name + ".b", nn::relu(h), 1, 0);
  return nn::add(x, h);
}

Var Tokenizer::encode(Binding& bind, Var x) const {
  const nn::Shape& s = x.shape();
  if (s.size() != 3 || s[2] != config_.input_dim || s[1] % config_.downsample_factor != 0) {
    throw DimensionError("tokenizer encode: input " + nn::shape_str(s) + " needs [B, T, " +
                         std::to_string(config_.input_dim) + "] with T divisible by " +
                         std::to_string(config_.downsample_factor));
  }
  Var h = nn::relu(conv(bind, "enc.in", x, 1, 1));
  for (std::size_t st = 0; st < stages(); ++st) {
    const std::string p = "enc.s" + std::to_string(st);
    h = conv(bind, p + ".down", h, 2, 1);
    std::size_t dil = 1;
    for (std::size_t b = 0; b < config_.blocks_per_stage; ++b, dil *= 3) h = res_block(bind, p + ".r" + std::to_string(b), h, dil);
  }
  return conv(bind, "enc.out", nn::relu(h), 1, 1);
}

Var Tokenizer::decode(Binding& bind, Var latents) const {
  const nn::Shape& s = latents.shape();
  if (s.size() != 3 || s[2] != config_.latent_dim()) {
    throw DimensionError("tokenizer decode: latents " + nn::shape_str(s) + " need last axis " +
                         std::to_string(config_.latent_dim()));
  }
  Var h = nn::relu(conv(bind, "dec.in", latents, 1, 1));
  for (std::size_t st = 0; st < stages(); ++st) {
    const std::string p = "dec.s" + std::to_string(st);
    std::size_t dil = 1;
    for (std::size_t b = 0; b < config_.blocks_per_stage; ++b, dil *= 3) h = res_block(bind, p + ".r" + std::to_string(b), h, dil);
    h = conv(bind, p + ".up", nn::upsample_repeat(h, 2), 1, 1);
  }
  return conv(bind, "dec.out", nn::relu(h), 1, 1);
}

namespace {

// FSQ codes enter the decoder rescaled from [0, L-1] to [-1, 1].
Var center_fsq(Var ste, const std::vector<int>& levels) {
  const std::size_t d = levels.size();
  Tensor scale({d}), shift({d});
  for (std::size_t i = 0; i < d; ++i) {
    const double half = (levels[i] - 1) / 2.0;
    scale[i] = 1.0 / half;
    shift[i] = -1.0;
  }
  return nn::add(nn::mul(ste, ste.tape().constant(scale)), ste.tape().constant(shift));
}

}  // namespace

Tokenizer::Quantized Tokenizer::quantize(Var z) const {
  Quantized q;
  q.latent = z;
  if (config_.quantizer == QuantizerKind::fsq) {
    q.decoder_input = center_fsq(fsq_ste(z, config_.fsq.levels, &q.indices), config_.fsq.levels);
    return q;
  }
  if (!vq_.initialized) throw ValidationError("vq: codebook used before initialization");
  VqOutput out = vq_quantize(z, vq_.codebook);
  q.decoder_input = out.quantized;
  q.target = out.codes;
  q.indices.assign(out.indices.begin(), out.indices.end());
  return q;
}

Tokenizer::Step Tokenizer::forward(Binding& bind, const Tensor& batch) const {
  Step st;
  Var x = bind.tape().constant(batch);
  Var z = encode(bind, x);
  st.q = quantize(z);
  st.recon = decode(bind, st.q.decoder_input);
  st.loss = config_.quantizer == QuantizerKind::fsq ? nn::mse(x, st.recon)
                                                     : vq_loss(x, st.recon, z, st.q.target, config_.vq.commitment);
  return st;
}

std::vector<int> Tokenizer::tokenize(const RowMatrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != config_.input_dim) {
    throw DimensionError("tokenize: rows have " + std::to_string(rows.cols()) + " columns, expected " +
                         std::to_string(config_.input_dim));
  }
  nn::Tape tape;
  Binding bind(tape, params_);
  Var z = encode(bind, tape.constant(rows_to_batch(pad_to_multiple(rows, config_.downsample_factor))));
  return quantize(z).indices;
}

Var Tokenizer::codes_to_decoder_input(nn::Tape& tape, const std::vector<int>& tokens, std::size_t count) const {
  const std::size_t Z = config_.latent_dim();
  Tensor lat({1, count, Z});
  const std::size_t S = codebook_size();
  for (std::size_t i = 0; i < count; ++i) {
    if (tokens[i] < 0 || static_cast<std::size_t>(tokens[i]) >= S) {
      throw ValidationError("token " + std::to_string(tokens[i]) + " outside codebook of " + std::to_string(S));
    }
    if (config_.quantizer == QuantizerKind::fsq) {
      const auto code = fsq_index_decode(static_cast<std::size_t>(tokens[i]), config_.fsq.levels);
      for (std::size_t k = 0; k < Z; ++k) lat[i * Z + k] = code[k];
    } else {
      std::copy_n(vq_.codebook.data() + static_cast<std::size_t>(tokens[i]) * Z, Z, lat.data() + i * Z);
    }
  }
  Var v = tape.constant(std::move(lat));
  return config_.quantizer == QuantizerKind::fsq ? center_fsq(v, config_.fsq.levels) : v;
}

RowMatrix Tokenizer::detokenize(const std::vector<int>& tokens, std::size_t frames) const {
  if (tokens.empty()) throw ValidationError("detokenize: empty token sequence");
  const std::size_t f = config_.downsample_factor;
  if (frames == 0 || frames > tokens.size() * f) {
    throw ValidationError("detokenize: " + std::to_string(frames) + " frames requested from " +
                          std::to_string(tokens.size()) + " tokens");
  }
  nn::Tape tape;
  Binding bind(tape, params_);
  Var out = decode(bind, codes_to_decoder_input(tape, tokens, tokens.size()));
  return batch_to_rows(out.value(), frames);
}

RowMatrix Tokenizer::reconstruct(const RowMatrix& rows) const {
  return detokenize(tokenize(rows), static_cast<std::size_t>(rows.rows()));
}

nn::Parameters Tokenizer::export_tensors() const {
  nn::Parameters out;
  for (std::size_t i = 0; i < params_.count(); ++i) out.add(params_.names()[i], params_.at(i));
  if (config_.quantizer == QuantizerKind::vq) {
    out.add("vq.codebook", vq_.codebook);
    out.add("vq.ema_count", vq_.ema_count);
    out.add("vq.ema_sum", vq_.ema_sum);
    Tensor unused({vq_.unused.size()});
    for (std::size_t k = 0; k < vq_.unused.size(); ++k) unused[k] = static_cast<double>(vq_.unused[k]);
    out.add("vq.unused", unused);
  }
  return out;
}

void Tokenizer::import_tensors(const nn::Parameters& tensors) {
  nn::Parameters weights;
  for (const auto& name : params_.names()) weights.add(name, tensors.get(name));
  nn::assign_parameters(params_, weights);
  if (config_.quantizer == QuantizerKind::vq) {
    VqState s = VqState::empty(config_.vq);
    auto take = [&](const char* name, Tensor& dst) {
      const Tensor& src = tensors.get(name);
      if (src.shape() != dst.shape()) throw DimensionError(std::string("checkpoint tensor ") + name + " has the wrong shape");
      dst = src;
    };
    take("vq.codebook", s.codebook);
    take("vq.ema_count", s.ema_count);
    take("vq.ema_sum", s.ema_sum);
    Tensor unused({s.unused.size()});
    take("vq.unused", unused);
    for (std::size_t k = 0; k < s.unused.size(); ++k) s.unused[k] = static_cast<std::size_t>(unused[k]);
    s.initialized = true;
    vq_ = std::move(s);
  }
}

void save_tokenizer(const std::string& path, const Tokenizer& tokenizer, const Json& extra_meta) {
  Json meta = extra_meta;
  meta["kind"] = "tokenizer";
  meta["config"] = tokenizer_config_to_json(tokenizer.config());
  nn::save_checkpoint(path, tokenizer.export_tensors(), meta);
}

Tokenizer load_tokenizer(const std::string& path) {
  const nn::Checkpoint ck = nn::load_checkpoint(path);
  if (ck.meta.value("kind", std::string()) != "tokenizer") throw ValidationError(path + " is not a tokenizer checkpoint");
  Tokenizer t(tokenizer_config_from_json(ck.meta.at("config")));
  t.import_tensors(ck.params);
  return t;
}

}  // namespace humo
