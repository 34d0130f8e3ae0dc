#include "humo/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace humo::nn {

namespace {

double evaluate(const ScalarFn& fn, const std::vector<Tensor>& point) {
  Tape tape;
  std::vector<Var> leaves;
  for (const Tensor& t : point) leaves.push_back(tape.constant(t));
  return fn(tape, leaves).value().item();
}

}  // namespace

double grad_check(const ScalarFn& fn, const std::vector<Tensor>& point, double h) {
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (const Tensor& t : point) leaves.push_back(tape.leaf(t));
    Var loss = fn(tape, leaves);
    tape.backward(loss);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const Tensor& g = leaves[i].grad();
      analytic.push_back(g.empty() ? Tensor(point[i].shape(), 0.0) : g);
    }
  }
  double worst = 0.0;
  std::vector<Tensor> probe = point;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    for (std::size_t j = 0; j < probe[i].size(); ++j) {
      const double x0 = probe[i][j];
      probe[i][j] = x0 + h;
      const double fp = evaluate(fn, probe);
      probe[i][j] = x0 - h;
      const double fm = evaluate(fn, probe);
      probe[i][j] = x0;
      const double fd = (fp - fm) / (2.0 * h);
      const double a = analytic[i][j];
      worst = std::max(worst, std::abs(a - fd) / std::max(1.0, std::abs(a)));
    }
  }
  return worst;
}

}  // namespace humo::nn
