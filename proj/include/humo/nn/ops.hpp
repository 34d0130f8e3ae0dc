#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "humo/nn/tape.hpp"

namespace humo::nn {

// Binary elementwise ops broadcast `b` when its shape is a suffix of `a`'s shape
// (bias rows, per-channel scales) or when it holds a single element.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);

Var relu(Var x);
Var sigmoid(Var x);
Var exp(Var x);
Var square(Var x);

Var sum(Var x);
Var mean(Var x);
/// Mean over one axis, which is removed from the shape.
Var mean_axis(Var x, std::size_t axis);

/// a: [..., k] (leading dims flattened), b: [k, n] -> [..., n].
Var matmul(Var a, Var b);
/// a: [B, m, k], b: [B, k, n] -> [B, m, n].
Var bmm(Var a, Var b);

Var reshape(Var x, Shape shape);
Var permute(Var x, const std::vector<std::size_t>& axes);
Var slice(Var x, std::size_t axis, std::size_t begin, std::size_t end);
Var concat(const std::vector<Var>& parts, std::size_t axis);
/// Same value, no gradient path (stop-gradient).
Var detach(Var x);
/// Forward value `value`, gradient passed to x unchanged: x + sg(value - x) without the
/// rounding of the explicit sum.
Var straight_through(Var x, Tensor value);

/// Softmax over the last axis.
Var softmax(Var x);
/// x / sqrt(mean(x^2) + eps) * gain over the last axis; gain has the last-axis size.
Var rmsnorm(Var x, Var gain, double eps = 1e-6);
/// x / sqrt(sum(x^2) + eps) over the last axis.
Var l2_normalize(Var x, double eps = 1e-12);

/// Rows of `table` ([V, E]) selected by ids -> [ids.size(), E].
Var embedding(Var table, std::span<const int> ids);

/// Sets entries to `value` wherever `blocked` (shaped like the last two axes of x) is
/// nonzero; the mask repeats over leading axes. Blocked entries receive no gradient.
Var masked_fill(Var x, const std::vector<std::uint8_t>& blocked, double value);

/// Mean over rows whose target differs from ignore_index of -log softmax(logits)[target].
/// logits: [N, V]. Throws ValidationError if every row is ignored.
Var cross_entropy(Var logits, std::span<const int> targets, int ignore_index = -1);

struct Conv1dOptions {
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t dilation = 1;
};

/// x: [B, T, Cin], weight: [K, Cin, Cout], bias: [Cout] (optional, pass Var{} to skip).
/// Zero padding. Output [B, T', Cout] with T' = (T + 2p - dil(K-1) - 1) / stride + 1.
Var conv1d(Var x, Var weight, Var bias, const Conv1dOptions& options = {});

/// Nearest-neighbour upsampling along time: [B, T, C] -> [B, T * factor, C].
Var upsample_repeat(Var x, std::size_t factor);

/// mean((a - b)^2).
Var mse(Var a, Var b);

}  // namespace humo::nn
