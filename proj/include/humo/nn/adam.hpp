#pragma once

#include <vector>

#include "humo/nn/parameters.hpp"

namespace humo::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Global L2 norm clip on the gradient; 0 disables.
  double clip_norm = 0.0;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// One bias-corrected update. `lr` overrides config.lr (for schedules) when positive.
  /// Returns the gradient's global norm before clipping.
  double step(Parameters& params, const std::vector<Tensor>& grads, double lr = 0.0);

  std::size_t steps() const { return step_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  std::size_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

double global_norm(const std::vector<Tensor>& grads);

}  // namespace humo::nn
