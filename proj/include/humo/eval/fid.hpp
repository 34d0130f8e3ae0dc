#pragma once

#include <Eigen/Core>

namespace humo {

inline constexpr double kFidRegularizer = 1e-6;
inline constexpr double kFidNegativeTolerance = 1e-8;

/// Frechet distance between Gaussian fits of two feature sets (rows are samples).
/// Covariances are unbiased; a set with at most E rows gets +1e-6 I. The cross term is
/// trace((sqrt(Sa) Sb sqrt(Sa))^(1/2)) from symmetric eigendecompositions. Eigenvalues in
/// [-1e-8, 0) are clamped to zero; anything more negative throws ValidationError.
double fid(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Same formula from precomputed moments.
double frechet_distance(const Eigen::VectorXd& mu_a, const Eigen::MatrixXd& cov_a, const Eigen::VectorXd& mu_b,
                        const Eigen::MatrixXd& cov_b);

}  // namespace humo
