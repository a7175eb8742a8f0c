#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "fishergen/array.hpp"
#include "fishergen/linalg.hpp"
#include "fishergen/metric.hpp"
#include "fishergen/model.hpp"

namespace fishergen {

struct MseResult {
  std::vector<double> per_datum;
  double mean = 0.0;
};

/// MSE_i = (1/k) Σ_j (d_ij − r_ij)², averaged over rows.
MseResult mse(const DenseArray& data, const DenseArray& reconstructions);

/// Reconstruct through the means: decode(encode(d).mu), no sampling.
DenseArray reconstruct_means(const GenerativeModel& model, const DenseArray& data);

/// One datum's latent summary. Eigenpairs are those of the posterior
/// precision: M(mu) for FisherNet, diag(exp(−logvar)) for the baseline.
struct LatentRecord {
  std::size_t index = 0;
  int label = 0;
  std::vector<double> mu;
  std::optional<std::vector<double>> eigvals;
  /// Row i is the eigenvector for eigvals[i].
  std::optional<DenseArray> eigvecs;
};

/// Dense M(mu) from latent_dim operator applications on the unit basis.
DenseArray metric_matrix(const MetricOperator& op);

/// Latent records for every row of `data`; with `with_eigen`, each record
/// also carries the precision eigenpairs.
std::vector<LatentRecord> latent_records(const GenerativeModel& model, const DenseArray& data,
                                         const std::vector<int>& labels, bool with_eigen);

/// Closed polyline mu + Σ_i (n_sigma / sqrt(eigval_i)) · (cos t, sin t)_i · v_i
/// at `points` equally spaced t. Throws ShapeError unless latent_dim == 2 and
/// eigenpairs are present.
std::vector<std::array<double, 2>> uncertainty_ellipse(const LatentRecord& record,
                                                       double n_sigma,
                                                       std::size_t points = 64);

/// Shoelace area of a closed polygon.
double polygon_area(const std::vector<std::array<double, 2>>& polygon);

}  // namespace fishergen
