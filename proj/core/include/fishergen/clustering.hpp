#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fishergen/array.hpp"

namespace fishergen {

struct KMeansResult {
  std::vector<std::size_t> assignments;
  DenseArray centers;  // [K, d]
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia after every center update, in iteration order.
  std::vector<double> inertia_history;
};

/// Lloyd iterations from K distinct seeded rows until the assignment stops
/// changing or max_iter is hit. An empty cluster is reseeded with the point
/// farthest from its current center. Requires 1 <= K <= rows.
KMeansResult kmeans(const DenseArray& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 300);

/// Best inertia over `restarts` independently seeded runs.
KMeansResult kmeans_restarts(const DenseArray& points, std::size_t k, std::uint64_t seed,
                             std::size_t max_iter = 300, std::size_t restarts = 10);

/// Maximum-weight perfect matching on a square matrix (Hungarian method,
/// O(n³)). Returns column_for_row.
std::vector<std::size_t> hungarian_max(const DenseArray& weights);

/// Class-by-cluster fraction matrix with columns permuted so that the trace
/// is maximal.
struct ClusterMatrix {
  /// [C, K]; row i holds the fraction of class i in each cluster. Column j
  /// is cluster column_order[j].
  DenseArray fractions;
  std::vector<std::size_t> column_order;
  double trace = 0.0;
};

/// Rows for classes without members stay zero.
ClusterMatrix cluster_trace(const std::vector<std::size_t>& assignments,
                            const std::vector<int>& labels, std::size_t classes,
                            std::size_t clusters);

}  // namespace fishergen
