#include "humo/nn/tape.hpp"

#include "humo/core/error.hpp"

namespace humo::nn {

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }

Var Tape::leaf(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, true, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, false, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, Backward backward) {
  bool needs = false;
  for (const Var& v : inputs) {
    if (&v.tape() != this) throw Error("tape: input recorded on a different tape");
    needs = needs || nodes_[v.id()].requires_grad;
  }
  return push(std::move(value), needs, std::move(backward));
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs, Backward backward) {
  bool needs = false;
  for (const Var& v : inputs) {
    if (&v.tape() != this) throw Error("tape: input recorded on a different tape");
    needs = needs || nodes_[v.id()].requires_grad;
  }
  return push(std::move(value), needs, std::move(backward));
}

Var Tape::push(Tensor value, bool needs, Backward backward) {
#ifndef NDEBUG
  if (!value.all_finite()) throw NonFiniteError("tape: non-finite value produced by node " + std::to_string(nodes_.size()));
#endif
  nodes_.push_back(Node{std::move(value), Tensor{}, needs, needs ? std::move(backward) : nullptr});
  return Var(this, nodes_.size() - 1);
}

Tensor* Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return nullptr;
  if (n.grad.empty() && !n.value.empty()) n.grad = Tensor(n.value.shape(), 0.0);
  return &n.grad;
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) throw Error("backward: loss belongs to another tape");
  if (loss.value().size() != 1) {
    throw DimensionError("backward: loss must be scalar, got shape " + shape_str(loss.shape()));
  }
  for (Node& n : nodes_) n.grad = Tensor{};
  if (!nodes_[loss.id()].requires_grad) return;
  grad_buffer(loss.id())->fill(1.0);
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.backward && !n.grad.empty()) n.backward(*this, id);
  }
}

}  // namespace humo::nn
