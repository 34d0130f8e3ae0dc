#include "humo/eval/retrieval.hpp"

#include <string>

#include "humo/core/error.hpp"

namespace humo {

std::vector<std::size_t> retrieval_ranks(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text) {
  if (motion.rows() != text.rows() || motion.cols() != text.cols()) {
    throw DimensionError("retrieval: motion " + std::to_string(motion.rows()) + "x" + std::to_string(motion.cols()) +
                         " vs text " + std::to_string(text.rows()) + "x" + std::to_string(text.cols()));
  }
  auto unit = [](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd u = m;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double n = u.row(i).norm();
      if (n > 0.0) u.row(i) /= n;
    }
    return u;
  };
  const Eigen::MatrixXd sim = unit(text) * unit(motion).transpose();
  const auto n = static_cast<std::size_t>(sim.rows());
  std::vector<std::size_t> ranks(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double own = sim(r, r);
    std::size_t rank = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = sim(r, static_cast<Eigen::Index>(j));
      if (s > own || (s == own && j < i)) ++rank;
    }
    ranks[i] = rank;
  }
  return ranks;
}

double retrieval_rk(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text, std::size_t k) {
  const auto n = static_cast<std::size_t>(motion.rows());
  if (k == 0 || k > n) throw ValidationError("retrieval: k = " + std::to_string(k) + " with " + std::to_string(n) + " pairs");
  std::size_t hits = 0;
  for (std::size_t r : retrieval_ranks(motion, text)) hits += r < k ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace humo
