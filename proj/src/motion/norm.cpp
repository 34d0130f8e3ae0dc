#include "humo/motion/norm.hpp"

#include <algorithm>
#include <cmath>

#include "humo/core/error.hpp"
#include "humo/core/hash.hpp"

namespace humo {

NormStats compute_norm_stats(const std::vector<RowMatrix>& blocks) {
  Eigen::Index dim = -1;
  std::size_t count = 0;
  for (const RowMatrix& b : blocks) {
    if (b.rows() == 0) continue;
    if (dim >= 0 && b.cols() != dim) throw DimensionError("compute_norm_stats: inconsistent row widths");
    dim = b.cols();
    count += static_cast<std::size_t>(b.rows());
  }
  if (count < 2) throw ValidationError("compute_norm_stats: need at least 2 rows");
  // Welford accumulation, row by row across blocks.
  const auto D = static_cast<std::size_t>(dim);
  std::vector<double> mean(D, 0.0), m2(D, 0.0);
  std::size_t seen = 0;
  for (const RowMatrix& b : blocks) {
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      ++seen;
      for (std::size_t c = 0; c < D; ++c) {
        const double x = b(r, static_cast<Eigen::Index>(c));
        const double delta = x - mean[c];
        mean[c] += delta / static_cast<double>(seen);
        m2[c] += delta * (x - mean[c]);
      }
    }
  }
  NormStats stats{mean, std::vector<double>(D)};
  for (std::size_t c = 0; c < D; ++c) {
    stats.std[c] = std::max(kStdFloor, std::sqrt(m2[c] / static_cast<double>(count)));
  }
  return stats;
}

NormStats compute_norm_stats(const RowMatrix& rows) { return compute_norm_stats(std::vector<RowMatrix>{rows}); }

RowMatrix normalize(const RowMatrix& rows, const NormStats& stats) {
  if (static_cast<std::size_t>(rows.cols()) != stats.dim()) throw DimensionError("normalize: width mismatch");
  RowMatrix out(rows.rows(), rows.cols());
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    for (Eigen::Index c = 0; c < rows.cols(); ++c)
      out(r, c) = (rows(r, c) - stats.mean[static_cast<std::size_t>(c)]) / stats.std[static_cast<std::size_t>(c)];
  return out;
}

RowMatrix denormalize(const RowMatrix& rows, const NormStats& stats) {
  if (static_cast<std::size_t>(rows.cols()) != stats.dim()) throw DimensionError("denormalize: width mismatch");
  RowMatrix out(rows.rows(), rows.cols());
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    for (Eigen::Index c = 0; c < rows.cols(); ++c)
      out(r, c) = rows(r, c) * stats.std[static_cast<std::size_t>(c)] + stats.mean[static_cast<std::size_t>(c)];
  return out;
}

Json norm_stats_to_json(const NormStats& stats) {
  return Json{{"format_version", 1}, {"mean", vector_to_json(stats.mean)}, {"std", vector_to_json(stats.std)}};
}

NormStats norm_stats_from_json(const Json& j) {
  try {
    NormStats s{json_to_vector(j.at("mean"), "mean"), json_to_vector(j.at("std"), "std")};
    if (s.mean.size() != s.std.size()) throw ValidationError("norm stats: mean/std length mismatch");
    for (double v : s.std)
      if (!(v >= kStdFloor)) throw ValidationError("norm stats: std below floor");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("norm stats: ") + e.what());
  }
}

std::string norm_stats_hash(const NormStats& stats) { return hash_string(norm_stats_to_json(stats).dump()); }

}  // namespace humo
