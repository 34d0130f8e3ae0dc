#include "humo/nn/parameters.hpp"

#include "humo/core/error.hpp"

namespace humo::nn {

Tensor& Parameters::add(const std::string& name, Tensor init) {
  if (contains(name)) throw ValidationError("duplicate parameter name: " + name);
  index_[name] = names_.size();
  names_.push_back(name);
  tensors_.push_back(std::move(init));
  return tensors_.back();
}

Tensor& Parameters::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown parameter: " + name);
  return tensors_[it->second];
}

const Tensor& Parameters::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown parameter: " + name);
  return tensors_[it->second];
}

std::size_t Parameters::scalar_count() const {
  std::size_t n = 0;
  for (const Tensor& t : tensors_) n += t.size();
  return n;
}

bool Parameters::all_finite() const {
  for (const Tensor& t : tensors_)
    if (!t.all_finite()) return false;
  return true;
}

Var Binding::operator()(const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  Var v = tape_.leaf(params_.get(name));
  bound_.emplace(name, v);
  return v;
}

void Binding::set(const std::string& name, Var v) {
  if (bound_.count(name)) throw ValidationError("binding: " + name + " is already bound");
  if (v.shape() != params_.get(name).shape()) {
    throw DimensionError("binding: " + name + " expects " + shape_str(params_.get(name).shape()) + ", got " +
                         shape_str(v.shape()));
  }
  bound_.emplace(name, v);
}

std::vector<Tensor> Binding::gradients() const {
  std::vector<Tensor> out;
  out.reserve(params_.count());
  for (std::size_t i = 0; i < params_.count(); ++i) {
    auto it = bound_.find(params_.names()[i]);
    if (it != bound_.end() && !it->second.grad().empty()) {
      out.push_back(it->second.grad());
    } else {
      out.emplace_back(params_.at(i).shape(), 0.0);
    }
  }
  return out;
}

}  // namespace humo::nn
