#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace humo {

/// Rank (0-based) of motion i among all motions for text query i, by cosine similarity.
/// Ties go to the lower motion index.
std::vector<std::size_t> retrieval_ranks(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text);

/// Fraction of text queries whose paired motion ranks within the top k. Throws
/// ValidationError when k is 0 or exceeds the number of pairs.
double retrieval_rk(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text, std::size_t k);

}  // namespace humo
