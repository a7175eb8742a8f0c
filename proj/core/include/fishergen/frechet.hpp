#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fishergen/array.hpp"

namespace fishergen {

/// ‖mu1 − mu2‖² + tr(C1 + C2 − 2 (C1^½ C2 C1^½)^½). When either covariance
/// is rank deficient a ridge of 1e-6·I is added to both.
double frechet_gaussian(std::span<const double> mu1, const DenseArray& cov1,
                        std::span<const double> mu2, const DenseArray& cov2);

/// Fréchet distance between Gaussians fitted (unbiased) to two feature sets.
double frechet_features(const DenseArray& features1, const DenseArray& features2);

/// Principal axes of a data set.
struct PcaBasis {
  std::vector<double> mean;  // [k]
  DenseArray components;     // [feat_dim, k], orthonormal rows
};

PcaBasis fit_pca(const DenseArray& data, std::size_t feat_dim);
DenseArray project(const PcaBasis& basis, const DenseArray& data);

/// Sample-quality proxy: PCA basis fitted on `real`, both sets projected to
/// feat_dim (clamped to the data dimension), Fréchet distance between the
/// projected Gaussians. Each set needs at least feat_dim + 1 rows.
double frechet_proxy(const DenseArray& real, const DenseArray& generated,
                     std::size_t feat_dim = 16);

}  // namespace fishergen
