#include "fishergen/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fishergen/errors.hpp"
#include "fishergen/linalg.hpp"

namespace fishergen {

namespace {

constexpr double kRidge = 1e-6;

bool rank_deficient(const DenseArray& cov) {
  const EigenDecomposition e = eig_sym(cov);
  const double top = std::max(e.values.front(), 0.0);
  return e.values.back() <= 1e-12 * std::max(top, 1e-300);
}

}  // namespace

double frechet_gaussian(std::span<const double> mu1, const DenseArray& cov1,
                        std::span<const double> mu2, const DenseArray& cov2) {
  const std::size_t f = mu1.size();
  if (mu2.size() != f || cov1.rows() != f || cov1.cols() != f || cov2.rows() != f ||
      cov2.cols() != f) {
    throw ShapeError("frechet_gaussian: dimension mismatch");
  }
  DenseArray c1 = cov1;
  DenseArray c2 = cov2;
  if (rank_deficient(c1) || rank_deficient(c2)) {
    for (std::size_t i = 0; i < f; ++i) {
      c1(i, i) += kRidge;
      c2(i, i) += kRidge;
    }
  }
  double mean_term = 0.0;
  for (std::size_t i = 0; i < f; ++i) mean_term += (mu1[i] - mu2[i]) * (mu1[i] - mu2[i]);
  const DenseArray s1 = sqrt_psd(c1);
  DenseArray inner = matmul(s1, matmul(c2, s1));
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = i + 1; j < f; ++j) inner(i, j) = inner(j, i) = 0.5 * (inner(i, j) + inner(j, i));
  }
  const EigenDecomposition e = eig_sym(inner);
  double tr_sqrt = 0.0;
  for (double lambda : e.values) tr_sqrt += std::sqrt(std::max(lambda, 0.0));
  const double d = mean_term + trace(c1) + trace(c2) - 2.0 * tr_sqrt;
  return std::max(d, 0.0);
}

double frechet_features(const DenseArray& features1, const DenseArray& features2) {
  if (features1.cols() != features2.cols()) throw ShapeError("frechet_features: width mismatch");
  std::vector<double> m1, m2;
  DenseArray c1, c2;
  mean_and_covariance(features1, m1, c1);
  mean_and_covariance(features2, m2, c2);
  return frechet_gaussian(m1, c1, m2, c2);
}

PcaBasis fit_pca(const DenseArray& data, std::size_t feat_dim) {
  if (feat_dim == 0 || feat_dim > data.cols()) throw ShapeError("fit_pca: feat_dim out of range");
  PcaBasis basis;
  DenseArray cov;
  mean_and_covariance(data, basis.mean, cov);
  basis.components = top_eigenpairs(cov, feat_dim).vectors;
  return basis;
}

DenseArray project(const PcaBasis& basis, const DenseArray& data) {
  const std::size_t k = basis.mean.size();
  if (data.cols() != k) throw ShapeError("project: data width differs from PCA basis");
  const std::size_t f = basis.components.rows();
  DenseArray out({data.rows(), f});
  std::vector<double> centered(k);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto row = data.row(i);
    for (std::size_t j = 0; j < k; ++j) centered[j] = row[j] - basis.mean[j];
    for (std::size_t c = 0; c < f; ++c) out(i, c) = dot(basis.components.row(c), centered);
  }
  return out;
}

double frechet_proxy(const DenseArray& real, const DenseArray& generated, std::size_t feat_dim) {
  if (real.cols() != generated.cols()) throw ShapeError("frechet_proxy: image sizes differ");
  feat_dim = std::min(feat_dim, real.cols());
  if (real.rows() < feat_dim + 1 || generated.rows() < feat_dim + 1) {
    throw ShapeError("frechet_proxy: each set needs at least " + std::to_string(feat_dim + 1) +
                     " images");
  }
  const PcaBasis basis = fit_pca(real, feat_dim);
  return frechet_features(project(basis, real), project(basis, generated));
}

}  // namespace fishergen
