#include "humo/generator/sample.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"

namespace humo {

Candidates sampling_candidates(std::span<const double> logits, const MotionVocab& vocab, double temperature,
                               std::size_t top_k) {
  if (logits.size() != vocab.size()) throw DimensionError("sampling: logits row does not match the vocabulary");
  if (temperature < 0.0) throw ValidationError("sampling: temperature must be >= 0");
  std::vector<int> ids;
  for (std::size_t i = 0; i < vocab.codebook_size; ++i) ids.push_back(static_cast<int>(i));
  ids.push_back(vocab.eos());
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return logits[a] > logits[b]; });
  std::size_t keep = ids.size();
  if (temperature == 0.0) keep = 1;
  else if (top_k > 0) keep = std::min(keep, top_k);
  ids.resize(keep);
  Candidates c;
  c.ids = ids;
  if (keep == 1) {
    c.probs = {1.0};
    return c;
  }
  const double top = logits[ids.front()] / temperature;
  double z = 0.0;
  for (int id : ids) {
    c.probs.push_back(std::exp(logits[id] / temperature - top));
    z += c.probs.back();
  }
  for (double& p : c.probs) p /= z;
  return c;
}

std::vector<int> sample(const Generator& model, std::span<const int> text, const SamplingConfig& s,
                        std::uint64_t seed) {
  const MotionVocab mv = model.config().motion_vocab();
  const std::size_t max_len = std::min(s.max_len, model.config().max_motion - 1);
  Rng rng(seed, 0x5a3);
  std::vector<int> seq{mv.bos()};
  std::vector<int> out;
  while (out.size() < max_len) {
    const nn::Tensor lg = model.logits(text, seq);
    const std::size_t V = lg.dim(1);
    std::vector<double> last(lg.data() + (seq.size() - 1) * V, lg.data() + seq.size() * V);
    if (out.size() < s.min_len) last[static_cast<std::size_t>(mv.eos())] = -std::numeric_limits<double>::infinity();
    const Candidates c = sampling_candidates(last, mv, s.temperature, s.top_k);
    int next = c.ids.front();
    if (c.ids.size() > 1) {
      const double u = rng.uniform();
      double acc = 0.0;
      next = c.ids.back();
      for (std::size_t i = 0; i < c.ids.size(); ++i) {
        acc += c.probs[i];
        if (u < acc) {
          next = c.ids[i];
          break;
        }
      }
    }
    if (next == mv.eos()) break;
    out.push_back(next);
    seq.push_back(next);
  }
  return out;
}

}  // namespace humo
