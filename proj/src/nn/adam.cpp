#include "humo/nn/adam.hpp"

#include <cmath>

#include "humo/core/error.hpp"

namespace humo::nn {

double global_norm(const std::vector<Tensor>& grads) {
  double ss = 0.0;
  for (const Tensor& g : grads)
    for (double v : g.values()) ss += v * v;
  return std::sqrt(ss);
}

double Adam::step(Parameters& params, const std::vector<Tensor>& grads, double lr) {
  if (grads.size() != params.count()) {
    throw DimensionError("adam: " + std::to_string(grads.size()) + " gradients for " +
                         std::to_string(params.count()) + " parameters");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].shape() != params.at(i).shape()) {
      throw DimensionError("adam: gradient " + shape_str(grads[i].shape()) + " for parameter " + params.names()[i] +
                           " of shape " + shape_str(params.at(i).shape()));
    }
  }
  if (m_.empty()) {
    for (std::size_t i = 0; i < params.count(); ++i) {
      m_.emplace_back(params.at(i).shape(), 0.0);
      v_.emplace_back(params.at(i).shape(), 0.0);
    }
  }
  const double norm = global_norm(grads);
  const double clip = (config_.clip_norm > 0.0 && norm > config_.clip_norm) ? config_.clip_norm / norm : 1.0;
  ++step_;
  const double rate = lr > 0.0 ? lr : config_.lr;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    Tensor& p = params.at(i);
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    const Tensor& g = grads[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j] * clip;
      m[j] = b1 * m[j] + (1.0 - b1) * gj;
      v[j] = b2 * v[j] + (1.0 - b2) * gj * gj;
      p[j] -= rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + config_.eps);
    }
  }
  return norm;
}

}  // namespace humo::nn
