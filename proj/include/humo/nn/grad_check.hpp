#pragma once

#include <functional>
#include <span>
#include <vector>

#include "humo/nn/tape.hpp"

namespace humo::nn {

/// Builds a scalar from leaves placed on the given tape.
using ScalarFn = std::function<Var(Tape&, std::span<const Var>)>;

/// max over all input coordinates of |analytic - central difference| / max(1, |analytic|).
double grad_check(const ScalarFn& fn, const std::vector<Tensor>& point, double h = 1e-5);

}  // namespace humo::nn
