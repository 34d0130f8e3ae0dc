#pragma once

#include <functional>
#include <string>
#include <vector>

#include "humo/eval/evaluator.hpp"
#include "humo/eval/metrics.hpp"
#include "humo/generator/train.hpp"
#include "humo/generator/vocab.hpp"
#include "humo/motion/norm.hpp"
#include "humo/pipeline/config.hpp"
#include "humo/tokenizer/model.hpp"
#include "humo/tokenizer/token_io.hpp"

namespace humo {

/// Split clips with their normalized representation rows. Stats come from train only.
struct PreparedCorpus {
  std::vector<MotionClip> train, test, val;
  NormStats stats;
  std::vector<RowMatrix> train_rows, test_rows, val_rows;
};

PreparedCorpus prepare_corpus(std::vector<MotionClip> train, std::vector<MotionClip> test, std::vector<MotionClip> val,
                              const RobotModel& model);

/// Held-out reconstruction metrics and codebook usage of a trained tokenizer.
MetricReport evaluate_tokenizer(const Tokenizer& tokenizer, const std::vector<MotionClip>& clips,
                                const std::vector<RowMatrix>& normalized, const NormStats& stats,
                                const RobotModel& model);

/// One sequence per clip, in clip order.
std::vector<TokenSequence> tokenize_clips(const Tokenizer& tokenizer, const std::vector<MotionClip>& clips,
                                          const std::vector<RowMatrix>& normalized);

/// Word-id/motion-id pairs for the generator.
std::vector<GeneratorPair> generator_pairs(const std::vector<TokenSequence>& tokens, const WordVocab& words);

std::vector<std::string> clip_texts(const std::vector<MotionClip>& clips);

/// Generator config sized for a token corpus: codebook and vocabulary sizes are filled in.
GeneratorConfig generator_config_for(const GeneratorConfig& base, std::size_t codebook_size, std::size_t text_vocab,
                                     std::uint64_t seed);

struct GenerationMetrics {
  double fid = 0.0;
  std::map<int, double> r_at;
};

/// Generates one motion per test text, embeds it with the evaluator and compares against
/// the real test motions.
GenerationMetrics evaluate_generation(const Generator& generator, const Tokenizer& tokenizer, const Evaluator& evaluator,
                                      const WordVocab& words, const std::vector<MotionClip>& clips,
                                      const std::vector<RowMatrix>& normalized, const SamplingConfig& sampling,
                                      std::uint64_t seed);

using SweepProgress = std::function<void(const Json&)>;

struct CodebookRun {
  std::string quantizer;
  std::size_t codebook_size = 0;
  std::uint64_t seed = 0;
  MetricReport report;
  double final_loss = 0.0;
};

std::vector<CodebookRun> sweep_codebook(const RunConfig& config, const PreparedCorpus& corpus, const RobotModel& model,
                                        const SweepProgress& progress = {});

struct ModelSizeRun {
  std::size_t codebook_size = 0;
  std::string model_size;
  std::size_t params = 0;
  std::uint64_t seed = 0;
  double val_nll = 0.0;
  GenerationMetrics generation;
};

/// Trains one FSQ tokenizer per generation codebook and the evaluator once, then the model
/// ladder on the largest codebook plus the largest model on every other codebook.
std::vector<ModelSizeRun> sweep_model_size(const RunConfig& config, const PreparedCorpus& corpus, const RobotModel& model,
                                           const SweepProgress& progress = {});

std::string codebook_runs_csv(const std::vector<CodebookRun>& runs);
std::string model_size_runs_csv(const std::vector<ModelSizeRun>& runs);

/// Curve data with columns x, median, min, max.
struct CurvePoint {
  double x = 0.0;
  std::vector<double> values;
};
std::string curve_csv(const std::vector<CurvePoint>& points);
double median(std::vector<double> values);

}  // namespace humo
