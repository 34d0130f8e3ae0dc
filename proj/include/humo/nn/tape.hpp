#pragma once

#include <functional>
#include <vector>

#include "humo/nn/tensor.hpp"

namespace humo::nn {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  const Tensor& grad() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Linear record of primitive ops. Nodes are appended in evaluation order, so reverse
/// insertion order is a valid topological order for the backward sweep.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Differentiable input.
  Var leaf(Tensor value);
  /// Input excluded from differentiation.
  Var constant(Tensor value);
  /// Output of a primitive; `backward` runs only if some input requires a gradient.
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Tensor value, const std::vector<Var>& inputs, Backward backward);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  /// Gradient accumulated so far; empty when the node received none.
  const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }
  /// Mutable gradient buffer (zero-initialized on first use), or nullptr when the node
  /// does not require a gradient.
  Tensor* grad_buffer(std::size_t id);

  /// Reverse sweep from a single-element loss. Throws DimensionError otherwise.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  Var push(Tensor value, bool needs, Backward backward);

  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

}  // namespace humo::nn
