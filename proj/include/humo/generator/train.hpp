#pragma once

#include <functional>
#include <vector>

#include "humo/generator/transformer.hpp"

namespace humo {

struct GeneratorPair {
  std::vector<int> text;    // word ids
  std::vector<int> motion;  // motion token ids, no control tokens
};

using GeneratorProgress = std::function<void(std::size_t, double)>;

/// Seeded Adam on teacher-forced NLL, pairs drawn without replacement per epoch. Returns
/// the per-step loss; throws DivergenceError with the step on a non-finite loss.
std::vector<double> train_generator(Generator& model, const std::vector<GeneratorPair>& pairs,
                                    const GeneratorProgress& progress = {});

/// Token-weighted mean NLL over every target position (EOS included).
double mean_nll(const Generator& model, const std::vector<GeneratorPair>& pairs);

}  // namespace humo
