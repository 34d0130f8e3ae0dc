#pragma once

#include <vector>

#include "humo/core/json_io.hpp"
#include "humo/kinematics/representation.hpp"

namespace humo {

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t dim() const { return mean.size(); }
};

inline constexpr double kStdFloor = 1e-8;

/// Per-channel mean and population std (floored at 1e-8) over all rows of all matrices.
/// Throws ValidationError with fewer than 2 rows in total.
NormStats compute_norm_stats(const std::vector<RowMatrix>& blocks);
NormStats compute_norm_stats(const RowMatrix& rows);

RowMatrix normalize(const RowMatrix& rows, const NormStats& stats);
RowMatrix denormalize(const RowMatrix& rows, const NormStats& stats);

Json norm_stats_to_json(const NormStats& stats);
NormStats norm_stats_from_json(const Json& j);
std::string norm_stats_hash(const NormStats& stats);

}  // namespace humo
