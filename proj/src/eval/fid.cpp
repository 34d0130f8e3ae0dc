#include "humo/eval/fid.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "humo/core/error.hpp"

namespace humo {

namespace {

Eigen::VectorXd clamped_eigenvalues(const Eigen::VectorXd& ev, const char* what) {
  Eigen::VectorXd out = ev;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < -kFidNegativeTolerance) {
      throw ValidationError(std::string("fid: ") + what + " has eigenvalue " + std::to_string(out[i]));
    }
    out[i] = std::max(out[i], 0.0);
  }
  return out;
}

void moments(const Eigen::MatrixXd& x, Eigen::VectorXd& mu, Eigen::MatrixXd& cov) {
  const Eigen::Index n = x.rows(), e = x.cols();
  if (n < 2) throw ValidationError("fid: need at least 2 samples, got " + std::to_string(n));
  if (!x.allFinite()) throw ValidationError("fid: non-finite features");
  mu = x.colwise().mean().transpose();
  const Eigen::MatrixXd c = x.rowwise() - mu.transpose();
  cov = (c.transpose() * c) / static_cast<double>(n - 1);
  if (n <= e) cov += kFidRegularizer * Eigen::MatrixXd::Identity(e, e);
}

}  // namespace

double frechet_distance(const Eigen::VectorXd& mu_a, const Eigen::MatrixXd& cov_a, const Eigen::VectorXd& mu_b,
                        const Eigen::MatrixXd& cov_b) {
  if (mu_a.size() != mu_b.size() || cov_a.rows() != mu_a.size() || cov_b.rows() != mu_b.size()) {
    throw DimensionError("fid: feature dimensions differ");
  }
  const Eigen::MatrixXd sa = 0.5 * (cov_a + cov_a.transpose());
  const Eigen::MatrixXd sb = 0.5 * (cov_b + cov_b.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(sa);
  const Eigen::VectorXd la = clamped_eigenvalues(ea.eigenvalues(), "covariance a");
  const Eigen::MatrixXd root_a = ea.eigenvectors() * la.cwiseSqrt().asDiagonal() * ea.eigenvectors().transpose();
  Eigen::MatrixXd m = root_a * sb * root_a;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(m, Eigen::EigenvaluesOnly);
  const double cross = clamped_eigenvalues(em.eigenvalues(), "covariance product").cwiseSqrt().sum();
  const double d = (mu_a - mu_b).squaredNorm() + sa.trace() + sb.trace() - 2.0 * cross;
  return std::max(d, 0.0);
}

double fid(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("fid: feature widths " + std::to_string(a.cols()) + " and " + std::to_string(b.cols()));
  }
  Eigen::VectorXd ma, mb;
  Eigen::MatrixXd ca, cb;
  moments(a, ma, ca);
  moments(b, mb, cb);
  return frechet_distance(ma, ca, mb, cb);
}

}  // namespace humo
