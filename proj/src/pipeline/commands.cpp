#include "humo/pipeline/commands.hpp"

#include <algorithm>
#include <map>

#include "humo/core/error.hpp"
#include "humo/core/hash.hpp"
#include "humo/eval/fid.hpp"
#include "humo/eval/retrieval.hpp"
#include "humo/generator/detokenize.hpp"
#include "humo/generator/sample.hpp"
#include "humo/kinematics/forward.hpp"
#include "humo/kinematics/retarget.hpp"
#include "humo/motion/filter.hpp"
#include "humo/motion/motion_io.hpp"
#include "humo/motion/split.hpp"
#include "humo/motion/synth.hpp"
#include "humo/nn/checkpoint.hpp"
#include "humo/pipeline/run_dir.hpp"
#include "humo/pipeline/sweeps.hpp"
#include "humo/tokenizer/train.hpp"

namespace humo {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string> kStageDirs{
    {"synth", "synth"},
    {"retarget", "retarget"},
    {"filter", "filter"},
    {"split", "split"},
    {"train-tokenizer", "tokenizer"},
    {"train-evaluator", "evaluator"},
    {"train-generator", "generator"},
    {"generate", "generate"},
    {"eval", "eval"},
    {"sweep-codebook", "sweep-codebook"},
    {"sweep-model-size", "sweep-model-size"},
};

constexpr std::size_t kProgressEvery = 50;

struct Context {
  const RunConfig& config;
  RobotModel model;
  std::string model_hash;
  RunDir run;
  const Emit& emit;

  void send(const Json& record) const {
    if (emit) emit(record);
  }
  fs::path input(const std::string& key, const fs::path& fallback) const {
    if (config.inputs.contains(key)) return fs::path(config.inputs.at(key).get<std::string>());
    return fallback;
  }
  fs::path stage(const std::string& command) const { return default_output_dir(config, command); }
};

RobotModel resolve_model(const RunConfig& config) {
  if (config.robot_model.empty()) return default_robot_model();
  if (!fs::exists(config.robot_model)) throw MissingArtifactError(config.robot_model.string());
  return load_robot_model_file(config.robot_model.string());
}

std::vector<MotionClip> read_clips(Context& ctx, const std::string& name, const fs::path& file) {
  ctx.run.add_input(name, file);
  MotionFile mf = read_motion_file(file);
  if (!mf.model_hash.empty() && mf.model_hash != ctx.model_hash)
    throw HashMismatchError(file.string() + " robot model", ctx.model_hash, mf.model_hash);
  return std::move(mf.clips);
}

void write_clips(Context& ctx, const std::string& name, const std::vector<MotionClip>& clips) {
  write_motion_file(ctx.run.path(name), clips, ctx.model.keypoint_count(), ctx.model_hash);
  ctx.run.add_output(name);
}

void write_json_output(Context& ctx, const std::string& name, const Json& value) {
  write_json_file(ctx.run.path(name), value);
  ctx.run.add_output(name);
}

void write_text_output(Context& ctx, const std::string& name, const std::string& text) {
  write_text_file(ctx.run.path(name), text);
  ctx.run.add_output(name);
}

Json ids_of(const std::vector<MotionClip>& clips) {
  Json a = Json::array();
  for (const MotionClip& c : clips) a.push_back(c.id);
  return a;
}

auto step_reporter(const Context& ctx, const std::string& what) {
  return [&ctx, what](std::size_t step, double loss) {
    if (step % kProgressEvery == 0) ctx.send(Json{{"event", "progress"}, {"stage", what}, {"step", step}, {"loss", loss}});
  };
}

PreparedCorpus load_split(Context& ctx) {
  const fs::path dir = ctx.input("split", ctx.stage("split"));
  auto train = read_clips(ctx, "train", dir / "train.jsonl");
  auto test = read_clips(ctx, "test", dir / "test.jsonl");
  auto val = read_clips(ctx, "val", dir / "val.jsonl");
  return prepare_corpus(std::move(train), std::move(test), std::move(val), ctx.model);
}

struct TokenizerArtifact {
  Tokenizer tokenizer;
  NormStats stats;
  std::string hash;
};

TokenizerArtifact load_tokenizer_artifact(Context& ctx) {
  const fs::path file = ctx.input("tokenizer", ctx.stage("train-tokenizer")) / "tokenizer.ckpt";
  ctx.run.add_input("tokenizer", file);
  const nn::Checkpoint ck = nn::load_checkpoint(file.string());
  return {load_tokenizer(file.string()), norm_stats_from_json(ck.meta.at("norm_stats")), hash_file(file)};
}

// ---------------------------------------------------------------- data stages

void cmd_synth(Context& ctx) {
  const SynthConfig& s = ctx.config.synth;
  std::vector<MotionClip> clips =
      synth_corpus(CorpusOptions{s.clips, ctx.config.seed, s.compose_probability, s.fps}, ctx.model);
  Json defects = Json::array();
  const Defect kinds[] = {Defect::velocity_spike, Defect::limit_breach, Defect::ground_penetration};
  const std::size_t clean = clips.size();
  for (std::size_t i = 0; i < s.inject_defects; ++i) {
    const Defect d = kinds[i % 3];
    InjectedClip inj = inject_infeasible(clips[(i * 7) % clean], d, ctx.config.seed + 1000 + i, ctx.model,
                                         ctx.config.filter);
    char id[32];
    std::snprintf(id, sizeof(id), "defect_%03zu", i);
    inj.clip.id = id;
    Json rec{{"id", inj.clip.id}, {"defect", to_string(d)}, {"frame", inj.frame}};
    if (inj.dof) rec["dof"] = *inj.dof;
    defects.push_back(rec);
    clips.push_back(std::move(inj.clip));
  }
  write_clips(ctx, "motions.jsonl", clips);

  std::vector<KeypointTrajectory> trajectories;
  const PointMatrix tpose = keypoint_positions(ctx.model, tpose_frame(ctx.model, Vec3(0, 0, kStandingRootHeight)));
  for (const MotionClip& c : clips) {
    KeypointTrajectory t{c.fps, c.id, c.text, tpose, {}};
    for (const Frame& f : c.frames) t.frames.push_back(keypoint_positions(ctx.model, f));
    trajectories.push_back(std::move(t));
  }
  write_keypoint_file(ctx.run.path("keypoints.jsonl"), trajectories);
  ctx.run.add_output("keypoints.jsonl");
  write_json_output(ctx, "defects.json", defects);
  ctx.run.add_metric("clips", clips.size());
  ctx.run.add_metric("defects", s.inject_defects);
}

void cmd_retarget(Context& ctx) {
  const fs::path file = ctx.input("keypoints", ctx.stage("synth") / "keypoints.jsonl");
  ctx.run.add_input("keypoints", file);
  const std::vector<KeypointTrajectory> sources = read_keypoint_file(file);
  std::vector<MotionClip> clips;
  Json report = Json::array();
  double residual_sum = 0.0;
  for (const KeypointTrajectory& src : sources) {
    RetargetReport rep;
    MotionClip c = retarget_trajectory(ctx.model, src, ctx.config.retarget, &rep);
    c.source_tag = SourceTag::retargeted;
    report.push_back(Json{{"id", c.id},
                          {"mean_residual", rep.mean_residual},
                          {"max_residual", rep.max_residual},
                          {"unconverged_frames", rep.unconverged_frames}});
    residual_sum += rep.mean_residual;
    clips.push_back(std::move(c));
    ctx.send(Json{{"event", "progress"}, {"stage", "retarget"}, {"clip", clips.back().id}, {"mean_residual", rep.mean_residual}});
  }
  write_clips(ctx, "motions.jsonl", clips);
  write_json_output(ctx, "report.json", report);
  ctx.run.add_metric("clips", clips.size());
  ctx.run.add_metric("mean_residual", clips.empty() ? 0.0 : residual_sum / static_cast<double>(clips.size()));
}

void cmd_filter(Context& ctx) {
  const std::vector<MotionClip> clips = read_clips(ctx, "motions", ctx.input("motions", ctx.stage("synth") / "motions.jsonl"));
  std::vector<MotionClip> kept;
  std::string report;
  std::map<std::string, std::size_t> by_rule;
  for (const MotionClip& c : clips) {
    const FilterReport r = feasibility_filter(c, ctx.model, ctx.config.filter);
    report += format_filter_report(r);
    if (r.verdict == Verdict::keep) {
      kept.push_back(c);
    } else {
      std::vector<std::string> rules;
      for (const Violation& v : r.violations) rules.push_back(v.rule);
      std::sort(rules.begin(), rules.end());
      rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
      for (const std::string& rule : rules) ++by_rule[rule];
    }
  }
  write_clips(ctx, "motions.jsonl", kept);
  write_text_output(ctx, "report.jsonl", report);
  const std::size_t rejected = clips.size() - kept.size();
  Json rules = Json::object();
  for (const auto& [k, v] : by_rule) rules[k] = v;
  const double fraction = clips.empty() ? 0.0 : static_cast<double>(rejected) / static_cast<double>(clips.size());
  write_json_output(ctx, "summary.json",
                    Json{{"total", clips.size()}, {"kept", kept.size()}, {"rejected", rejected},
                         {"rejected_fraction", fraction}, {"by_rule", rules}});
  ctx.run.add_metric("kept", kept.size());
  ctx.run.add_metric("rejected", rejected);
  ctx.run.add_metric("rejected_fraction", fraction);
}

void cmd_split(Context& ctx) {
  const std::vector<MotionClip> clips =
      read_clips(ctx, "motions", ctx.input("motions", ctx.stage("filter") / "motions.jsonl"));
  const auto parts = split_dataset(clips, ctx.config.split, ctx.config.seed);
  write_clips(ctx, "train.jsonl", parts[0]);
  write_clips(ctx, "test.jsonl", parts[1]);
  write_clips(ctx, "val.jsonl", parts[2]);
  write_json_output(ctx, "manifest.json", Json{{"train", ids_of(parts[0])}, {"test", ids_of(parts[1])}, {"val", ids_of(parts[2])}});
  std::vector<RowMatrix> rows;
  for (const MotionClip& c : parts[0]) rows.push_back(clip_to_rows(ctx.model, c));
  write_json_output(ctx, "norm_stats.json", norm_stats_to_json(compute_norm_stats(rows)));
  ctx.run.add_metric("train", parts[0].size());
  ctx.run.add_metric("test", parts[1].size());
  ctx.run.add_metric("val", parts[2].size());
}

// ---------------------------------------------------------------- training

void cmd_train_tokenizer(Context& ctx) {
  const PreparedCorpus corpus = load_split(ctx);
  TokenizerConfig tc = ctx.config.tokenizer;
  tc.input_dim = feature_dim(ctx.model);
  Tokenizer tok(tc);
  const TrainingCurve curve = train_tokenizer(tok, corpus.train_rows, step_reporter(ctx, "train-tokenizer"));
  save_tokenizer(ctx.run.path("tokenizer.ckpt").string(), tok,
                 Json{{"norm_stats", norm_stats_to_json(corpus.stats)}, {"robot_model_hash", ctx.model_hash}});
  ctx.run.add_output("tokenizer.ckpt");
  const std::string hash = hash_file(ctx.run.path("tokenizer.ckpt"));

  auto write_tokens = [&](const std::string& name, const std::vector<MotionClip>& clips,
                          const std::vector<RowMatrix>& rows) {
    TokenFile tf;
    tf.codebook_size = tok.codebook_size();
    tf.quantizer = to_string(tc.quantizer);
    if (tc.quantizer == QuantizerKind::fsq) tf.levels = tc.fsq.levels;
    tf.downsample_factor = tc.downsample_factor;
    tf.model_hash = hash;
    tf.sequences = tokenize_clips(tok, clips, rows);
    write_token_file(ctx.run.path(name), tf);
    ctx.run.add_output(name);
  };
  write_tokens("tokens_train.jsonl", corpus.train, corpus.train_rows);
  write_tokens("tokens_test.jsonl", corpus.test, corpus.test_rows);
  write_tokens("tokens_val.jsonl", corpus.val, corpus.val_rows);
  write_json_output(ctx, "curve.json", training_curve_to_json(curve));

  const MetricReport report = evaluate_tokenizer(tok, corpus.test, corpus.test_rows, corpus.stats, ctx.model);
  const Json metrics = metric_report_to_json(report);
  write_json_output(ctx, "metrics.json", metrics);
  for (const auto& [k, v] : metrics.items()) ctx.run.add_metric(k, v);
}

std::vector<EvalPair> eval_pairs(const std::vector<MotionClip>& clips, const std::vector<RowMatrix>& rows,
                                 const WordVocab& words) {
  std::vector<EvalPair> out;
  for (std::size_t i = 0; i < clips.size(); ++i) out.push_back({rows[i], text_tokenize(clips[i].text, words)});
  return out;
}

std::vector<std::vector<int>> texts_of(const std::vector<EvalPair>& pairs) {
  std::vector<std::vector<int>> out;
  for (const EvalPair& p : pairs) out.push_back(p.text);
  return out;
}

void cmd_train_evaluator(Context& ctx) {
  const PreparedCorpus corpus = load_split(ctx);
  const WordVocab words = WordVocab::build(clip_texts(corpus.train));
  EvaluatorConfig ec = ctx.config.evaluator;
  ec.input_dim = feature_dim(ctx.model);
  ec.vocab_size = words.size();
  Evaluator ev(ec);
  const std::vector<double> curve = train_evaluator(ev, eval_pairs(corpus.train, corpus.train_rows, words));
  save_evaluator(ctx.run.path("evaluator.ckpt").string(), ev,
                 Json{{"words", words.to_json()}, {"norm_stats", norm_stats_to_json(corpus.stats)}});
  ctx.run.add_output("evaluator.ckpt");
  write_json_output(ctx, "curve.json", Json{{"loss", curve}});

  const std::vector<EvalPair> test = eval_pairs(corpus.test, corpus.test_rows, words);
  std::vector<RowMatrix> motions;
  for (const EvalPair& p : test) motions.push_back(p.motion);
  const Eigen::MatrixXd me = ev.motion_embeddings(motions);
  const Eigen::MatrixXd te = ev.text_embeddings(texts_of(test));
  MetricReport report;
  for (int k = 1; k <= 3; ++k)
    if (static_cast<std::size_t>(k) <= test.size()) report.r_at[k] = retrieval_rk(me, te, k);
  const Json metrics = metric_report_to_json(report);
  write_json_output(ctx, "metrics.json", metrics);
  for (const auto& [k, v] : metrics.items()) ctx.run.add_metric(k, v);
}

TokenFile read_tokens_checked(Context& ctx, const fs::path& dir, const std::string& name, const std::string& tokenizer_hash) {
  const fs::path file = dir / name;
  ctx.run.add_input(name, file);
  TokenFile tf = read_token_file(file);
  if (tf.model_hash != tokenizer_hash) throw HashMismatchError(file.string() + " tokenizer", tokenizer_hash, tf.model_hash);
  return tf;
}

void cmd_train_generator(Context& ctx) {
  const fs::path dir = ctx.input("tokenizer", ctx.stage("train-tokenizer"));
  const TokenizerArtifact art = load_tokenizer_artifact(ctx);
  const TokenFile train = read_tokens_checked(ctx, dir, "tokens_train.jsonl", art.hash);
  const TokenFile val = read_tokens_checked(ctx, dir, "tokens_val.jsonl", art.hash);
  std::vector<std::string> texts;
  for (const TokenSequence& s : train.sequences) texts.push_back(s.text);
  const WordVocab words = WordVocab::build(texts);
  GeneratorConfig gc = generator_config_for(ctx.config.generator, train.codebook_size, words.size(),
                                            ctx.config.generator.train.seed);
  Generator gen(gc);
  const std::vector<double> curve = train_generator(gen, generator_pairs(train.sequences, words),
                                                    step_reporter(ctx, "train-generator"));
  save_generator(ctx.run.path("generator.ckpt").string(), gen, words, Json{{"tokenizer_hash", art.hash}});
  ctx.run.add_output("generator.ckpt");
  write_json_output(ctx, "curve.json", Json{{"loss", curve}});
  const double nll = mean_nll(gen, generator_pairs(val.sequences, words));
  write_json_output(ctx, "metrics.json", Json{{"val_nll", nll}, {"params", gen.params().scalar_count()}});
  ctx.run.add_metric("val_nll", nll);
}

LoadedGenerator load_generator_checked(Context& ctx, const std::string& tokenizer_hash) {
  const fs::path file = ctx.input("generator", ctx.stage("train-generator")) / "generator.ckpt";
  ctx.run.add_input("generator", file);
  LoadedGenerator g = load_generator(file.string());
  const std::string recorded = g.meta.value("tokenizer_hash", std::string());
  if (recorded != tokenizer_hash) throw HashMismatchError(file.string() + " tokenizer", recorded, tokenizer_hash);
  return g;
}

// ---------------------------------------------------------------- inference

void cmd_generate(Context& ctx) {
  const TokenizerArtifact art = load_tokenizer_artifact(ctx);
  const LoadedGenerator g = load_generator_checked(ctx, art.hash);
  const GenerateConfig& gen = ctx.config.generate;
  const std::vector<int> text = text_tokenize(gen.prompt, g.words);
  const std::vector<int> ids = sample(g.model, text, g.model.config().sampling, gen.seed);
  const DecodedMotion decoded = decode_motion(ids, art.tokenizer, art.stats, ctx.model, ctx.config.synth.fps);
  MotionClip clip = decoded.clip;
  clip.text = gen.prompt;
  clip.id = "generated";
  write_clips(ctx, "motion.jsonl", {clip});
  write_json_output(ctx, "tokens.json", Json{{"prompt", gen.prompt}, {"seed", gen.seed}, {"tokens", ids}});
  ctx.run.add_metric("tokens", ids.size());
  ctx.run.add_metric("frames", clip.size());
  ctx.run.add_metric("consistency", decoded.consistency);
}

void cmd_eval(Context& ctx) {
  const PreparedCorpus corpus = load_split(ctx);
  const TokenizerArtifact art = load_tokenizer_artifact(ctx);
  const LoadedGenerator g = load_generator_checked(ctx, art.hash);
  const fs::path ev_file = ctx.input("evaluator", ctx.stage("train-evaluator")) / "evaluator.ckpt";
  ctx.run.add_input("evaluator", ev_file);
  const Evaluator ev = load_evaluator(ev_file.string());
  const WordVocab ev_words = WordVocab::from_json(nn::load_checkpoint(ev_file.string()).meta.at("words"));

  // The evaluator sees rows normalized with the tokenizer's stats; both come from the same split.
  const std::vector<RowMatrix>& real = corpus.test_rows;
  const std::size_t factor = art.tokenizer.config().downsample_factor;
  std::vector<RowMatrix> generated;
  std::vector<std::vector<int>> texts;
  std::vector<GeneratorPair> test_pairs;
  for (std::size_t i = 0; i < corpus.test.size(); ++i) {
    const std::vector<int> text = text_tokenize(corpus.test[i].text, g.words);
    const std::vector<int> ids = sample(g.model, text, g.model.config().sampling, ctx.config.seed * 1000003 + i);
    generated.push_back(art.tokenizer.detokenize(ids, ids.size() * factor));
    texts.push_back(text_tokenize(corpus.test[i].text, ev_words));
    test_pairs.push_back({text, art.tokenizer.tokenize(real[i])});
  }
  const Eigen::MatrixXd gen_emb = ev.motion_embeddings(generated);
  const Eigen::MatrixXd real_emb = ev.motion_embeddings(real);
  const Eigen::MatrixXd text_emb = ev.text_embeddings(texts);
  MetricReport report = evaluate_tokenizer(art.tokenizer, corpus.test, real, art.stats, ctx.model);
  report.fid = fid(gen_emb, real_emb);
  for (int k = 1; k <= 3; ++k)
    if (static_cast<std::size_t>(k) <= corpus.test.size()) report.r_at[k] = retrieval_rk(gen_emb, text_emb, k);
  report.validate();
  Json out = metric_report_to_json(report);
  out["nll"] = mean_nll(g.model, test_pairs);
  write_json_output(ctx, "report.json", out);
  for (const auto& [k, v] : out.items()) ctx.run.add_metric(k, v);
}

// ---------------------------------------------------------------- sweeps

void cmd_sweep_codebook(Context& ctx) {
  const PreparedCorpus corpus = load_split(ctx);
  const auto runs = sweep_codebook(ctx.config, corpus, ctx.model, [&](const Json& r) { ctx.send(r); });
  write_text_output(ctx, "results.csv", codebook_runs_csv(runs));
  for (const std::string& q : ctx.config.sweep.quantizers) {
    std::vector<CurvePoint> usage, l1;
    for (std::size_t size : ctx.config.sweep.codebook_sizes) {
      CurvePoint u{static_cast<double>(size), {}}, l{static_cast<double>(size), {}};
      for (const CodebookRun& r : runs)
        if (r.quantizer == q && r.codebook_size == size) {
          u.values.push_back(*r.report.usage);
          l.values.push_back(*r.report.l1);
        }
      usage.push_back(u);
      l1.push_back(l);
    }
    write_text_output(ctx, "usage_" + q + ".csv", curve_csv(usage));
    write_text_output(ctx, "l1_" + q + ".csv", curve_csv(l1));
  }
  ctx.run.add_metric("runs", runs.size());
}

void cmd_sweep_model_size(Context& ctx) {
  const PreparedCorpus corpus = load_split(ctx);
  const auto runs = sweep_model_size(ctx.config, corpus, ctx.model, [&](const Json& r) { ctx.send(r); });
  write_text_output(ctx, "results.csv", model_size_runs_csv(runs));
  const auto& cbs = ctx.config.sweep.generation_codebooks;
  const std::size_t main_cb = *std::max_element(cbs.begin(), cbs.end());
  std::vector<CurvePoint> nll, fid_curve, r1;
  for (const std::string& size : ctx.config.sweep.model_sizes) {
    CurvePoint a, b, c;
    for (const ModelSizeRun& r : runs)
      if (r.codebook_size == main_cb && r.model_size == size) {
        a.x = b.x = c.x = static_cast<double>(r.params);
        a.values.push_back(r.val_nll);
        b.values.push_back(r.generation.fid);
        c.values.push_back(r.generation.r_at.at(1));
      }
    nll.push_back(a);
    fid_curve.push_back(b);
    r1.push_back(c);
  }
  write_text_output(ctx, "nll.csv", curve_csv(nll));
  write_text_output(ctx, "fid.csv", curve_csv(fid_curve));
  write_text_output(ctx, "r_at_1.csv", curve_csv(r1));
  std::vector<CurvePoint> by_codebook;
  for (std::size_t cb : cbs) {
    CurvePoint p{static_cast<double>(cb), {}};
    for (const ModelSizeRun& r : runs)
      if (r.codebook_size == cb && r.model_size == ctx.config.sweep.model_sizes.back()) p.values.push_back(r.generation.fid);
    by_codebook.push_back(p);
  }
  write_text_output(ctx, "fid_by_codebook.csv", curve_csv(by_codebook));
  ctx.run.add_metric("runs", runs.size());
}

using Handler = void (*)(Context&);

const std::map<std::string, Handler> kHandlers{
    {"synth", cmd_synth},
    {"retarget", cmd_retarget},
    {"filter", cmd_filter},
    {"split", cmd_split},
    {"train-tokenizer", cmd_train_tokenizer},
    {"train-evaluator", cmd_train_evaluator},
    {"train-generator", cmd_train_generator},
    {"generate", cmd_generate},
    {"eval", cmd_eval},
    {"sweep-codebook", cmd_sweep_codebook},
    {"sweep-model-size", cmd_sweep_model_size},
};

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"synth",           "retarget",        "filter",        "split",
                                              "train-tokenizer", "train-generator", "train-evaluator", "generate",
                                              "eval",            "sweep-codebook",  "sweep-model-size"};
  return names;
}

fs::path default_output_dir(const RunConfig& config, const std::string& command) {
  const auto it = kStageDirs.find(command);
  if (it == kStageDirs.end()) throw ValidationError("unknown command " + command);
  return config.workspace / it->second;
}

void run_command(const std::string& command, const RunConfig& config, const fs::path& out, const Emit& emit) {
  const auto it = kHandlers.find(command);
  if (it == kHandlers.end()) throw ValidationError("unknown command " + command);
  config.validate();
  const fs::path dir = out.empty() ? default_output_dir(config, command) : out;
  fs::create_directories(dir);
  RobotModel model = resolve_model(config);
  const std::string mhash = model_hash(model);
  Context ctx{config, std::move(model), mhash, RunDir(dir, command, run_config_to_json(config)), emit};
  ctx.send(Json{{"event", "start"}, {"command", command}, {"out", dir.string()}});
  it->second(ctx);
  ctx.run.finalize();
  ctx.send(Json{{"event", "done"}, {"command", command}, {"metrics", read_json_file(dir / kRunRecord).at("metrics")}});
}

}  // namespace humo
