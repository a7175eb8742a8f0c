#include "fishergen/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "fishergen/errors.hpp"
#include "fishergen/rng.hpp"

namespace fishergen {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

KMeansResult kmeans(const DenseArray& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  if (points.rank() != 2 || k == 0 || k > n) {
    throw ShapeError("kmeans: need 1 <= K <= point count (K = " + std::to_string(k) +
                     ", points = " + std::to_string(n) + ")");
  }
  CounterRng rng(seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  KMeansResult res;
  res.centers = DenseArray({k, dim});
  for (std::size_t c = 0; c < k; ++c) {
    std::copy(points.row(idx[c]).begin(), points.row(idx[c]).end(), res.centers.row(c).begin());
  }
  res.assignments.assign(n, std::numeric_limits<std::size_t>::max());
  std::vector<double> dist(n);
  std::vector<std::size_t> counts(k);

  for (std::size_t it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points.row(i), res.centers.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (res.assignments[i] != best) changed = true;
      res.assignments[i] = best;
      dist[i] = best_d;
    }
    if (!changed) break;
    res.iterations = it + 1;

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t a : res.assignments) ++counts[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[res.assignments[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
      }
      if (far == n) continue;
      --counts[res.assignments[far]];
      res.assignments[far] = c;
      counts[c] = 1;
      dist[far] = 0.0;
    }

    std::fill(res.centers.values().begin(), res.centers.values().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto center = res.centers.row(res.assignments[i]);
      auto p = points.row(i);
      for (std::size_t j = 0; j < dim; ++j) center[j] += p[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (double& x : res.centers.row(c)) x /= static_cast<double>(counts[c]);
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      inertia += squared_distance(points.row(i), res.centers.row(res.assignments[i]));
    }
    res.inertia_history.push_back(inertia);
  }
  res.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res.inertia += squared_distance(points.row(i), res.centers.row(res.assignments[i]));
  }
  return res;
}

KMeansResult kmeans_restarts(const DenseArray& points, std::size_t k, std::uint64_t seed,
                             std::size_t max_iter, std::size_t restarts) {
  KMeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    const std::uint64_t run_seed = CounterRng::derive(seed, r).next_u64();
    KMeansResult res = kmeans(points, k, run_seed, max_iter);
    if (!have || res.inertia < best.inertia) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

std::vector<std::size_t> hungarian_max(const DenseArray& weights) {
  if (weights.rank() != 2 || weights.rows() != weights.cols()) {
    throw ShapeError("hungarian_max: square matrix required");
  }
  const std::size_t n = weights.rows();
  if (n == 0) return {};
  // Potentials u, v over 1-based rows/cols; minimize −w.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weights(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> column_for_row(n);
  for (std::size_t j = 1; j <= n; ++j) column_for_row[match[j] - 1] = j - 1;
  return column_for_row;
}

ClusterMatrix cluster_trace(const std::vector<std::size_t>& assignments,
                            const std::vector<int>& labels, std::size_t classes,
                            std::size_t clusters) {
  if (assignments.size() != labels.size()) {
    throw ShapeError("cluster_trace: assignment and label counts differ");
  }
  DenseArray counts({classes, clusters}, 0.0);
  std::vector<double> row_totals(classes, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes ||
        assignments[i] >= clusters) {
      throw ShapeError("cluster_trace: label or assignment out of range");
    }
    counts(static_cast<std::size_t>(labels[i]), assignments[i]) += 1.0;
    row_totals[static_cast<std::size_t>(labels[i])] += 1.0;
  }
  const std::size_t n = std::max(classes, clusters);
  DenseArray padded({n, n}, 0.0);
  for (std::size_t i = 0; i < classes; ++i) {
    for (std::size_t j = 0; j < clusters; ++j) {
      if (row_totals[i] > 0.0) padded(i, j) = counts(i, j) / row_totals[i];
    }
  }
  const std::vector<std::size_t> col_for_row = hungarian_max(padded);

  ClusterMatrix out;
  // Matched clusters first in class order, then the unmatched ones.
  std::vector<char> placed(clusters, 0);
  for (std::size_t i = 0; i < std::min(classes, clusters); ++i) {
    const std::size_t c = col_for_row[i];
    if (c >= clusters) continue;
    out.column_order.push_back(c);
    placed[c] = 1;
  }
  for (std::size_t i = std::min(classes, clusters); i < n; ++i) {
    const std::size_t c = col_for_row[i];
    if (c < clusters && !placed[c]) {
      out.column_order.push_back(c);
      placed[c] = 1;
    }
  }
  for (std::size_t c = 0; c < clusters; ++c) {
    if (!placed[c]) out.column_order.push_back(c);
  }
  out.fractions = DenseArray({classes, clusters}, 0.0);
  for (std::size_t i = 0; i < classes; ++i) {
    for (std::size_t j = 0; j < clusters; ++j) out.fractions(i, j) = padded(i, out.column_order[j]);
  }
  for (std::size_t i = 0; i < classes; ++i) out.trace += padded(i, col_for_row[i]);
  return out;
}

}  // namespace fishergen
