#include "humo/generator/train.hpp"

#include <cmath>

#include "humo/core/error.hpp"
#include "humo/core/rng.hpp"
#include "humo/nn/adam.hpp"
#include "humo/nn/ops.hpp"

namespace humo {

std::vector<double> train_generator(Generator& model, const std::vector<GeneratorPair>& pairs,
                                    const GeneratorProgress& progress) {
  const GeneratorConfig& c = model.config();
  if (pairs.empty()) throw ValidationError("train_generator: empty corpus");
  const MotionVocab mv = c.motion_vocab();
  std::vector<TeacherForcing> tf;
  tf.reserve(pairs.size());
  for (const GeneratorPair& p : pairs) {
    if (p.motion.size() + 1 > c.max_motion) {
      throw ValidationError("train_generator: sequence of " + std::to_string(p.motion.size()) +
                            " tokens exceeds max_motion " + std::to_string(c.max_motion));
    }
    tf.push_back(teacher_forcing(p.motion, mv));
  }
  Rng rng(c.train.seed, 0x7a1);
  nn::Adam adam(nn::AdamConfig{c.train.lr, 0.9, 0.999, 1e-8, c.train.clip_norm});
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();
  const std::size_t B = std::min(c.train.batch_size, pairs.size());
  std::vector<double> curve;
  curve.reserve(c.train.steps);
  for (std::size_t step = 0; step < c.train.steps; ++step) {
    nn::Tape tape;
    nn::Binding bind(tape, model.params());
    std::vector<nn::Var> logits;
    std::vector<int> targets;
    double loss = 0.0;
    try {
      for (std::size_t b = 0; b < B; ++b) {
        if (cursor == order.size()) {
          rng.shuffle(order);
          cursor = 0;
        }
        const std::size_t i = order[cursor++];
        logits.push_back(model.forward(bind, pairs[i].text, tf[i].inputs));
        targets.insert(targets.end(), tf[i].targets.begin(), tf[i].targets.end());
      }
      nn::Var l = nll_loss(logits.size() == 1 ? logits[0] : nn::concat(logits, 0), targets, mv);
      loss = l.value().item();
      if (!std::isfinite(loss)) throw DivergenceError(step);
      tape.backward(l);
    } catch (const NonFiniteError&) {
      throw DivergenceError(step);
    }
    adam.step(model.params(), bind.gradients());
    if (!model.params().all_finite()) throw DivergenceError(step);
    curve.push_back(loss);
    if (progress) progress(step, loss);
  }
  return curve;
}

double mean_nll(const Generator& model, const std::vector<GeneratorPair>& pairs) {
  if (pairs.empty()) throw ValidationError("mean_nll: no pairs");
  double total = 0.0;
  std::size_t n = 0;
  for (const GeneratorPair& p : pairs) {
    const SequenceScore s = score_sequence(model, p.text, p.motion);
    total -= s.log_prob;
    n += s.positions;
  }
  return total / static_cast<double>(n);
}

}  // namespace humo
