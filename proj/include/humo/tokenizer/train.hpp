#pragma once

#include <functional>
#include <span>
#include <vector>

#include "humo/tokenizer/model.hpp"

namespace humo {

struct TrainingCurve {
  std::vector<double> loss;  // per step
  struct Usage {
    std::size_t step = 0;
    double usage = 0.0;
  };
  std::vector<Usage> usage;  // per epoch, over the tokens seen in that epoch
  std::size_t resets = 0;    // VQ codebook resets
};

Json training_curve_to_json(const TrainingCurve& curve);

/// Called after every step with (step, loss).
using TrainProgress = std::function<void(std::size_t, double)>;

/// Seeded minibatch Adam training on random crops of normalized clips. Throws
/// DivergenceError (with the step) on a non-finite loss.
TrainingCurve train_tokenizer(Tokenizer& tokenizer, const std::vector<RowMatrix>& corpus,
                              const TrainProgress& progress = {});

/// Distinct tokens / codebook size. Throws ValidationError for out-of-range tokens.
double codebook_usage(std::span<const int> tokens, std::size_t codebook_size);

}  // namespace humo
