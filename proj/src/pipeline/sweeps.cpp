#include "humo/pipeline/sweeps.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "humo/core/error.hpp"
#include "humo/eval/fid.hpp"
#include "humo/eval/retrieval.hpp"
#include "humo/generator/sample.hpp"
#include "humo/tokenizer/train.hpp"

namespace humo {

namespace {

std::vector<RowMatrix> normalized_rows(const std::vector<MotionClip>& clips, const NormStats& stats,
                                       const RobotModel& model) {
  std::vector<RowMatrix> out;
  out.reserve(clips.size());
  for (const MotionClip& c : clips) out.push_back(normalize(clip_to_rows(model, c), stats));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

PreparedCorpus prepare_corpus(std::vector<MotionClip> train, std::vector<MotionClip> test, std::vector<MotionClip> val,
                              const RobotModel& model) {
  PreparedCorpus p;
  p.train = std::move(train);
  p.test = std::move(test);
  p.val = std::move(val);
  std::vector<RowMatrix> raw;
  for (const MotionClip& c : p.train) raw.push_back(clip_to_rows(model, c));
  p.stats = compute_norm_stats(raw);
  for (const RowMatrix& r : raw) p.train_rows.push_back(normalize(r, p.stats));
  p.test_rows = normalized_rows(p.test, p.stats, model);
  p.val_rows = normalized_rows(p.val, p.stats, model);
  return p;
}

MetricReport evaluate_tokenizer(const Tokenizer& tokenizer, const std::vector<MotionClip>& clips,
                                const std::vector<RowMatrix>& normalized, const NormStats& stats,
                                const RobotModel& model) {
  if (clips.size() != normalized.size() || clips.empty())
    throw DimensionError("evaluate_tokenizer: clip and row counts differ or are empty");
  const FeatureLayout layout(model);
  std::vector<MotionClip> recon_clips;
  std::vector<int> all_tokens;
  double l1_sum = 0.0, nm_sum = 0.0;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const std::vector<int> tokens = tokenizer.tokenize(normalized[i]);
    all_tokens.insert(all_tokens.end(), tokens.begin(), tokens.end());
    const RowMatrix recon = tokenizer.detokenize(tokens, static_cast<std::size_t>(normalized[i].rows()));
    const auto n = static_cast<double>(normalized[i].rows());
    l1_sum += l1_metric(recon, normalized[i]) * n;
    nm_sum += normalized_mpjpe(recon, normalized[i], layout, model.keypoint_count()) * n;
    frames += static_cast<std::size_t>(normalized[i].rows());
    MotionClip rc = clips[i];
    rc.frames = rows_to_frames(denormalize(recon, stats), model);
    recon_clips.push_back(std::move(rc));
  }
  MetricReport r;
  r.usage = codebook_usage(all_tokens, tokenizer.codebook_size());
  r.l1 = l1_sum / static_cast<double>(frames);
  r.normalized_mpjpe = nm_sum / static_cast<double>(frames);
  r.mpjpe = mpjpe(recon_clips, clips, model);
  r.mpkpe = mpkpe(recon_clips, clips, model);
  return r;
}

std::vector<TokenSequence> tokenize_clips(const Tokenizer& tokenizer, const std::vector<MotionClip>& clips,
                                          const std::vector<RowMatrix>& normalized) {
  std::vector<TokenSequence> out;
  for (std::size_t i = 0; i < clips.size(); ++i)
    out.push_back({clips[i].id, clips[i].text, clips[i].size(), tokenizer.tokenize(normalized[i])});
  return out;
}

std::vector<GeneratorPair> generator_pairs(const std::vector<TokenSequence>& tokens, const WordVocab& words) {
  std::vector<GeneratorPair> out;
  for (const TokenSequence& s : tokens) out.push_back({text_tokenize(s.text, words), s.tokens});
  return out;
}

std::vector<std::string> clip_texts(const std::vector<MotionClip>& clips) {
  std::vector<std::string> out;
  for (const MotionClip& c : clips) out.push_back(c.text);
  return out;
}

GeneratorConfig generator_config_for(const GeneratorConfig& base, std::size_t codebook_size, std::size_t text_vocab,
                                     std::uint64_t seed) {
  GeneratorConfig c = base;
  c.codebook_size = codebook_size;
  c.text_vocab = text_vocab;
  c.train.seed = seed;
  return c;
}

GenerationMetrics evaluate_generation(const Generator& generator, const Tokenizer& tokenizer, const Evaluator& evaluator,
                                      const WordVocab& words, const std::vector<MotionClip>& clips,
                                      const std::vector<RowMatrix>& normalized, const SamplingConfig& sampling,
                                      std::uint64_t seed) {
  if (clips.size() < 2) throw ValidationError("evaluate_generation: need at least 2 test clips");
  const std::size_t factor = tokenizer.config().downsample_factor;
  std::vector<RowMatrix> generated;
  std::vector<std::vector<int>> eval_texts;
  const WordVocab& eval_words = words;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const std::vector<int> text = text_tokenize(clips[i].text, words);
    const std::vector<int> ids = sample(generator, text, sampling, seed * 1000003 + i);
    generated.push_back(tokenizer.detokenize(ids, ids.size() * factor));
    eval_texts.push_back(text_tokenize(clips[i].text, eval_words));
  }
  const Eigen::MatrixXd gen_emb = evaluator.motion_embeddings(generated);
  const Eigen::MatrixXd real_emb = evaluator.motion_embeddings(normalized);
  const Eigen::MatrixXd text_emb = evaluator.text_embeddings(eval_texts);
  GenerationMetrics m;
  m.fid = fid(gen_emb, real_emb);
  for (int k = 1; k <= 3; ++k)
    if (static_cast<std::size_t>(k) <= clips.size()) m.r_at[k] = retrieval_rk(gen_emb, text_emb, k);
  return m;
}

std::vector<CodebookRun> sweep_codebook(const RunConfig& config, const PreparedCorpus& corpus, const RobotModel& model,
                                        const SweepProgress& progress) {
  std::vector<CodebookRun> runs;
  for (const std::string& q : config.sweep.quantizers) {
    for (std::size_t size : config.sweep.codebook_sizes) {
      for (std::uint64_t seed : config.sweep.seeds) {
        TokenizerConfig tc = config.tokenizer;
        tc.input_dim = feature_dim(model);
        tc.quantizer = quantizer_from_string(q);
        if (tc.quantizer == QuantizerKind::fsq)
          tc.fsq.levels = fsq_levels_for_size(size);
        else
          tc.vq.codebook_size = size;
        tc.train.seed = seed;
        Tokenizer tok(tc);
        const TrainingCurve curve = train_tokenizer(tok, corpus.train_rows);
        CodebookRun run{q, size, seed, evaluate_tokenizer(tok, corpus.test, corpus.test_rows, corpus.stats, model),
                        curve.loss.empty() ? 0.0 : curve.loss.back()};
        if (progress)
          progress(Json{{"event", "run"},
                        {"quantizer", q},
                        {"codebook_size", size},
                        {"seed", seed},
                        {"metrics", metric_report_to_json(run.report)}});
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

std::vector<ModelSizeRun> sweep_model_size(const RunConfig& config, const PreparedCorpus& corpus, const RobotModel& model,
                                           const SweepProgress& progress) {
  const auto& codebooks = config.sweep.generation_codebooks;
  const auto& sizes = config.sweep.model_sizes;
  if (codebooks.empty() || sizes.empty()) throw ValidationError("sweep: generation_codebooks and model_sizes must be non-empty");
  const std::size_t main_codebook = *std::max_element(codebooks.begin(), codebooks.end());
  const std::string& largest = sizes.back();

  const WordVocab words = WordVocab::build(clip_texts(corpus.train));
  EvaluatorConfig ec = config.evaluator;
  ec.input_dim = feature_dim(model);
  ec.vocab_size = words.size();
  Evaluator evaluator(ec);
  {
    std::vector<EvalPair> pairs;
    for (std::size_t i = 0; i < corpus.train.size(); ++i)
      pairs.push_back({corpus.train_rows[i], text_tokenize(corpus.train[i].text, words)});
    train_evaluator(evaluator, pairs);
  }
  if (progress) progress(Json{{"event", "evaluator_trained"}});

  std::vector<ModelSizeRun> runs;
  for (std::size_t codebook : codebooks) {
    TokenizerConfig tc = config.tokenizer;
    tc.input_dim = feature_dim(model);
    tc.quantizer = QuantizerKind::fsq;
    tc.fsq.levels = fsq_levels_for_size(codebook);
    tc.train.seed = config.seed;
    Tokenizer tok(tc);
    train_tokenizer(tok, corpus.train_rows);
    const auto train_pairs = generator_pairs(tokenize_clips(tok, corpus.train, corpus.train_rows), words);
    const auto val_pairs = generator_pairs(tokenize_clips(tok, corpus.val, corpus.val_rows), words);
    if (progress) progress(Json{{"event", "tokenizer_trained"}, {"codebook_size", codebook}});

    for (const std::string& size : sizes) {
      if (codebook != main_codebook && size != largest) continue;
      for (std::uint64_t seed : config.sweep.seeds) {
        GeneratorConfig gc = generator_config_for(config.generator, codebook, words.size(), seed);
        apply_model_size(gc, size);
        Generator gen(gc);
        train_generator(gen, train_pairs);
        ModelSizeRun run;
        run.codebook_size = codebook;
        run.model_size = size;
        run.params = gen.params().scalar_count();
        run.seed = seed;
        run.val_nll = mean_nll(gen, val_pairs);
        run.generation = evaluate_generation(gen, tok, evaluator, words, corpus.test, corpus.test_rows, gc.sampling, seed);
        if (progress) {
          Json r{{"event", "run"},   {"codebook_size", codebook}, {"model_size", size}, {"params", run.params},
                 {"seed", seed},     {"val_nll", run.val_nll},    {"fid", run.generation.fid}};
          for (const auto& [k, v] : run.generation.r_at) r["r_at_" + std::to_string(k)] = v;
          progress(r);
        }
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

std::string codebook_runs_csv(const std::vector<CodebookRun>& runs) {
  std::ostringstream os;
  os << "quantizer,codebook_size,seed,usage,mpjpe,mpkpe,l1,normalized_mpjpe,final_loss\n";
  for (const CodebookRun& r : runs)
    os << r.quantizer << ',' << r.codebook_size << ',' << r.seed << ',' << fmt(*r.report.usage) << ','
       << fmt(*r.report.mpjpe) << ',' << fmt(*r.report.mpkpe) << ',' << fmt(*r.report.l1) << ','
       << fmt(*r.report.normalized_mpjpe) << ',' << fmt(r.final_loss) << '\n';
  return os.str();
}

std::string model_size_runs_csv(const std::vector<ModelSizeRun>& runs) {
  std::ostringstream os;
  os << "codebook_size,model_size,params,seed,val_nll,fid,r_at_1,r_at_2,r_at_3\n";
  for (const ModelSizeRun& r : runs) {
    os << r.codebook_size << ',' << r.model_size << ',' << r.params << ',' << r.seed << ',' << fmt(r.val_nll) << ','
       << fmt(r.generation.fid);
    for (int k = 1; k <= 3; ++k) {
      const auto it = r.generation.r_at.find(k);
      os << ',' << (it == r.generation.r_at.end() ? std::string() : fmt(it->second));
    }
    os << '\n';
  }
  return os.str();
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream os;
  os << "x,median,min,max\n";
  for (const CurvePoint& p : points) {
    const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
    os << fmt(p.x) << ',' << fmt(median(p.values)) << ',' << fmt(*lo) << ',' << fmt(*hi) << '\n';
  }
  return os.str();
}

}  // namespace humo
