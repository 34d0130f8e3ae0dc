#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "humo/generator/transformer.hpp"

namespace humo {

/// Candidate ids after temperature and top-k, with their probabilities. Only motion ids
/// and EOS are candidates. Temperature 0 keeps the single argmax (lowest index on ties).
struct Candidates {
  std::vector<int> ids;
  std::vector<double> probs;
};
Candidates sampling_candidates(std::span<const double> logits, const MotionVocab& vocab, double temperature,
                               std::size_t top_k);

/// BOS-seeded autoregressive loop that stops at EOS or after max_len motion tokens. The
/// returned ids exclude BOS and EOS.
std::vector<int> sample(const Generator& model, std::span<const int> text, const SamplingConfig& sampling,
                        std::uint64_t seed);

}  // namespace humo
