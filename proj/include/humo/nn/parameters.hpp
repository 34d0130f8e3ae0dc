#pragma once

#include <map>
#include <string>
#include <vector>

#include "humo/nn/tape.hpp"

namespace humo::nn {

/// Named parameter tensors in insertion order. The order fixes checkpoint layout and
/// the optimizer's traversal, so it must not depend on map iteration.
class Parameters {
 public:
  /// Registers a new tensor; throws ValidationError on a duplicate name.
  Tensor& add(const std::string& name, Tensor init);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<std::string>& names() const { return names_; }
  std::size_t count() const { return names_.size(); }
  std::size_t scalar_count() const;
  Tensor& at(std::size_t i) { return tensors_[i]; }
  const Tensor& at(std::size_t i) const { return tensors_[i]; }
  bool all_finite() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
  std::map<std::string, std::size_t> index_;
};

/// Places parameters on a tape as leaves (once per name) and reads their gradients back.
class Binding {
 public:
  Binding(Tape& tape, const Parameters& params) : tape_(tape), params_(params) {}

  Var operator()(const std::string& name);
  /// Uses `v` for `name` instead of a fresh leaf. Throws if the name is already bound or
  /// unknown, or the shapes differ.
  void set(const std::string& name, Var v);
  Tape& tape() { return tape_; }

  /// One gradient per parameter in Parameters order; zeros for parameters never used.
  std::vector<Tensor> gradients() const;

 private:
  Tape& tape_;
  const Parameters& params_;
  std::map<std::string, Var> bound_;
};

}  // namespace humo::nn
